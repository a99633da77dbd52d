#include <random>
#include <set>
#include <thread>

#include "doctest.h"
#include "edgeagent/error.hpp"
#include "edgeagent/sim/device.hpp"
#include "edgeagent/sim/dump.hpp"
#include "edgeagent/text.hpp"
#include "support/fixtures.hpp"

using namespace edgeagent;
using namespace edgeagent::sim;
using namespace edgeagent::testing;

namespace {

Errc launch_error(Device& d, const IntentMsg& i, bool privileged = false) {
  auto r = d.launch_intent(i, privileged);
  REQUIRE(r.error.has_value());
  return *r.error;
}

// Independent matcher: split both strings on '/', compare literal segments.
std::optional<Params> naive_match(const std::string& pattern, const std::string& uri) {
  auto p = text::split(pattern, '/');
  auto u = text::split(uri, '/');
  if (p.size() != u.size()) return std::nullopt;
  Params out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i].size() > 2 && p[i].front() == '{' && p[i].back() == '}') {
      if (u[i].empty()) return std::nullopt;
      out[p[i].substr(1, p[i].size() - 2)] = u[i];
    } else if (p[i] != u[i]) {
      return std::nullopt;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("component launch binds extras as params") {
  Device d(sample_apps());
  auto r = d.launch_intent(component_intent("shop", "SearchResults", {{"q", "Evian spray"}}), false);
  REQUIRE(r.ok());
  CHECK(r.page->activity == "SearchResults");
  CHECK(r.page->params.at("q") == "Evian spray");
  CHECK(d.foreground()->app_id == "shop");
}

TEST_CASE("unexported activity needs privilege") {
  Device d(sample_apps());
  CHECK(launch_error(d, component_intent("shop", "Secret")) == Errc::NotExported);
  CHECK_FALSE(d.foreground().has_value());
  CHECK(d.launch_intent(component_intent("shop", "Secret"), true).ok());
}

TEST_CASE("launch errors") {
  Device d(sample_apps());
  CHECK(launch_error(d, component_intent("shop", "Nope")) == Errc::UnknownComponent);
  CHECK(launch_error(d, component_intent("nope", "Home")) == Errc::UnknownComponent);
  CHECK(launch_error(d, uri_intent("app://shop/unknown/1")) == Errc::NoMatch);
  CHECK(d.launch_log().empty());
}

TEST_CASE("deeplink binds slots") {
  Device d(sample_apps());
  auto r = d.launch_intent(uri_intent("app://shop/item/42"), false);
  REQUIRE(r.ok());
  CHECK(r.page->activity == "Item");
  CHECK(r.page->params == Params{{"id", "42"}});
}

TEST_CASE("deeplink resolution agrees with a brute-force matcher") {
  std::mt19937 rng(17);
  const std::vector<std::string> hosts = {"shop", "food", "gallery"};
  const std::vector<std::string> heads = {"item", "search", "deal", "x"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string uri = "app://" + hosts[rng() % hosts.size()];
    int depth = 1 + static_cast<int>(rng() % 3);
    uri += "/" + heads[rng() % heads.size()];
    for (int k = 1; k < depth; ++k) uri += "/v" + std::to_string(rng() % 100);
    Device d(sample_apps());
    auto r = d.launch_intent(uri_intent(uri), false);

    std::optional<std::pair<std::string, Params>> want;
    for (const auto& app : d.apps())
      for (const auto& act : app.activities)
        for (const auto& pat : act.deeplinks)
          if (!want)
            if (auto m = naive_match(pat, uri)) want = std::make_pair(app.app_id + "/" + act.name, *m);
    if (want) {
      REQUIRE(r.ok());
      CHECK(r.page->app_id + "/" + r.page->activity == want->first);
      CHECK(r.page->params == want->second);
    } else {
      CHECK(r.error == Errc::NoMatch);
    }
  }
}

TEST_CASE("tap fires the declared transition") {
  Device d(sample_apps());
  auto home = d.launch_intent(component_intent("shop", "Home"), false);
  auto t = d.apply_gesture(Tap{center_of(home.page->ui_root, "search")});
  CHECK(t.changed);
  CHECK(t.page->activity == "SearchResults");
  CHECK(t.page->params.at("q") == "Evian spray");
}

TEST_CASE("tap on a non-clickable area changes nothing") {
  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "Home"), false);
  auto before = d.state_digest();
  auto t = d.apply_gesture(Tap{{540, 1500}});
  CHECK_FALSE(t.changed);
  CHECK(d.state_digest() == before);
}

TEST_CASE("multi_tap selects several tiles in one transition") {
  Device d(sample_apps());
  auto p = d.launch_intent(component_intent("gallery", "Picker"), false).page;
  std::vector<Point> pts;
  for (const char* id : {"tiles/row0", "tiles/row2", "tiles/row4"}) pts.push_back(center_of(p->ui_root, id));
  auto t = d.apply_gesture(MultiTap{pts});
  CHECK(t.changed);
  CHECK(t.page->params.at("selected") == "a,c,e");
  int selected = 0;
  walk(t.page->ui_root, [&](const UiNode& n, bool) { selected += n.content_desc == "selected"; });
  CHECK(selected == 3);
  CHECK(d.task_stack("gallery")->size() == 1);
}

TEST_CASE("gesture errors") {
  Device d(sample_apps());
  CHECK_THROWS_AS(d.apply_gesture(Back{}), Error);
  try {
    d.apply_gesture(Tap{{1, 1}});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoForeground);
  }
  d.launch_intent(component_intent("shop", "Home"), false);
  try {
    d.apply_gesture(Tap{{1080, 5}});
    FAIL("expected OutOfBounds");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OutOfBounds);
  }
}

TEST_CASE("back on a single-entry stack clears the foreground") {
  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "Home"), false);
  auto t = d.apply_gesture(Back{});
  CHECK(t.changed);
  CHECK_FALSE(d.foreground().has_value());
  CHECK((d.task_stack("shop") == nullptr || d.task_stack("shop")->empty()));
}

TEST_CASE("back then relaunch restores the identical page") {
  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "Home"), false);
  auto first = d.launch_intent(component_intent("shop", "Item", {{"id", "7"}}), false);
  auto before = serialize_tree(first.page->ui_root);
  d.apply_gesture(Back{});
  CHECK(d.foreground()->activity == "Home");
  auto again = d.launch_intent(component_intent("shop", "Item", {{"id", "7"}}), false);
  CHECK(serialize_tree(again.page->ui_root) == before);
}

TEST_CASE("scroll clamps to content") {
  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "SearchResults", {{"q", "x"}}), false);
  d.apply_gesture(Scroll{ScrollDirection::down, 100});
  CHECK(d.snapshot().scroll_offset == 6);
  d.apply_gesture(Scroll{ScrollDirection::up, 100});
  CHECK(d.snapshot().scroll_offset == 0);
}

TEST_CASE("snapshot is pure") {
  Device d(sample_apps());
  CHECK_THROWS_AS(d.snapshot(), Error);
  d.launch_intent(component_intent("shop", "Home"), false);
  auto a = d.snapshot();
  auto b = d.snapshot();
  CHECK(a.activity == "Home");
  CHECK(serialize_tree(a.ui_root) == serialize_tree(b.ui_root));
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("overlay-only text has no backing node") {
  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "Ads"), false);
  auto obs = d.snapshot();
  std::set<std::string> tree_texts;
  walk(obs.ui_root, [&](const UiNode& n, bool) {
    if (!n.text.empty()) tree_texts.insert(n.text);
  });
  std::vector<RenderText> extra;
  for (const auto& r : obs.render_layer)
    if (!tree_texts.count(r.text)) extra.push_back(r);
  REQUIRE(extra.size() == 1);
  CHECK(extra[0].text == "Claim Reward");
  CHECK(extra[0].origin == TextOrigin::overlay_only);
  CHECK_FALSE(extra[0].backing_node.has_value());
}

TEST_CASE("render completeness") {
  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "SearchResults", {{"q", "spray"}}), false);
  d.apply_gesture(Scroll{ScrollDirection::down, 3});
  auto obs = d.snapshot();
  walk(obs.ui_root, [&](const UiNode& n, bool) {
    if (n.text.empty()) return;
    bool found = std::any_of(obs.render_layer.begin(), obs.render_layer.end(), [&](const RenderText& r) {
      return r.origin == TextOrigin::structural && r.backing_node == n.node_id && r.text == n.text;
    });
    CHECK_MESSAGE(found, n.node_id);
  });
  for (const auto& r : obs.render_layer) CHECK(kScreenRect.contains(r.bbox));
}

TEST_CASE("dumpsys layout") {
  Device empty(sample_apps());
  CHECK(empty.dumpsys_activity().empty());

  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "Home", {{"k", "v"}}), false);
  auto dump = d.dumpsys_activity();
  CHECK(dump ==
        "TASK shop id=1\n"
        "  ACTIVITY shop/Home\n"
        "    intent={act=android.intent.action.MAIN dat=- cmp=shop/Home extras={k=v}}\n");
}

TEST_CASE("dumpsys records deeplink launches with uri and component") {
  Device d(sample_apps());
  d.launch_intent(uri_intent("app://shop/item/9"), false);
  auto dump = d.dumpsys_activity();
  CHECK(dump.find("dat=app://shop/item/9") != std::string::npos);
  CHECK(dump.find("cmp=shop/Item") != std::string::npos);
}

TEST_CASE("alarms") {
  Device d(sample_apps());
  AlarmSpec once;
  once.fire_at = 1000;
  once.payload.payload = std::string("ping");
  d.add_alarm(once);
  CHECK(d.advance_clock(0).empty());
  CHECK(d.advance_clock(1500).size() == 1);
  CHECK(d.clock() == 1500);
  CHECK(d.advance_clock(10000).empty());

  Device r(sample_apps());
  AlarmSpec rep;
  rep.fire_at = 1000;
  rep.repeat_every = 1000;
  rep.payload.payload = std::string("sync");
  r.add_alarm(rep);
  auto ev = r.advance_clock(3500);
  REQUIRE(ev.size() == (3500 - 1000) / 1000 + 1);
  CHECK(ev[0].timestamp == 1000);
  CHECK(ev[1].timestamp == 2000);
  CHECK(ev[2].timestamp == 3000);

  AlarmSpec bad;
  bad.fire_at = 5000;
  bad.repeat_every = 0;
  CHECK_THROWS_AS(r.add_alarm(bad), Error);
  CHECK_THROWS_AS(r.advance_clock(-1), Error);
}

TEST_CASE("media_list filters by id") {
  Device d(sample_apps());
  for (int i = 1; i <= 5; ++i) d.add_media({i, "img" + std::to_string(i) + ".jpg", "DCIM", i * 10, 10, 10, {}});
  CHECK(d.media_list(0).size() == 5);
  CHECK(d.media_list(5).empty());
  auto tail = d.media_list(3);
  REQUIRE(tail.size() == 2);
  CHECK(tail[0].asset_id == 4);
  CHECK(tail[1].asset_id == 5);
  CHECK_THROWS_AS(d.add_media({6, "img1.jpg", "DCIM", 100, 1, 1, {}}), Error);
  CHECK_THROWS_AS(d.add_media({3, "late.jpg", "DCIM", 1000, 1, 1, {}}), Error);
}

TEST_CASE("playback echoes into the microphone") {
  Device d(sample_apps());
  d.set_playback({{"now playing", 100, 900, Channel::playback}, {"next song", 2000, 2600, Channel::playback}});
  auto mic = d.capture_mic({{"check price", 300, 800, Channel::mic}});
  CHECK(mic.size() == 3);
  int echoes = 0;
  for (const auto& s : mic)
    if (s.text == "now playing" || s.text == "next song") {
      ++echoes;
      CHECK((s.t_start == 100 || s.t_start == 2000));
    }
  CHECK(echoes == 2);
  d.set_playback({});
  CHECK(d.capture_mic({{"hi", 0, 10, Channel::mic}}).size() == 1);
  try {
    d.set_playback({{"a", 0, 500, Channel::playback}, {"b", 400, 900, Channel::playback}});
    FAIL("expected OverlappingSegments");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OverlappingSegments);
  }
}

TEST_CASE("determinism across twin devices") {
  auto drive = [](Device& d) {
    std::vector<std::string> out;
    d.launch_intent(component_intent("shop", "Home"), false);
    out.push_back(to_json(d.snapshot()).dump());
    d.apply_gesture(Tap{center_of(d.snapshot().ui_root, "search")});
    d.apply_gesture(Scroll{ScrollDirection::down, 2});
    out.push_back(to_json(d.snapshot()).dump());
    out.push_back(d.dumpsys_activity());
    out.push_back(d.state_digest());
    return out;
  };
  Device a(sample_apps(), 99), b(sample_apps(), 99);
  CHECK(drive(a) == drive(b));
}

TEST_CASE("foreground is the top of its stack") {
  Device d(sample_apps());
  std::mt19937 rng(5);
  d.launch_intent(component_intent("shop", "Home"), false);
  for (int i = 0; i < 200; ++i) {
    if (d.foreground()) {
      auto obs = d.snapshot();
      switch (rng() % 4) {
        case 0: d.apply_gesture(Back{}); break;
        case 1: d.apply_gesture(Scroll{rng() % 2 ? ScrollDirection::down : ScrollDirection::up, 1}); break;
        default: {
          Point p{static_cast<int>(rng() % 1080), static_cast<int>(rng() % 1920)};
          d.apply_gesture(Tap{p});
        }
      }
    } else {
      d.launch_intent(component_intent(rng() % 2 ? "shop" : "gallery", rng() % 2 ? "Home" : "Picker"), false);
    }
    if (auto fg = d.foreground()) {
      const auto* stack = d.task_stack(fg->app_id);
      REQUIRE(stack);
      REQUIRE_FALSE(stack->empty());
      CHECK(stack->back().activity == fg->activity);
      CHECK(stack->back().params == fg->params);
    }
  }
}

TEST_CASE("restore_task foregrounds the existing stack") {
  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "Item", {{"id", "3"}}), false);
  d.launch_intent(component_intent("gallery", "Picker"), false);
  auto p = d.restore_task("shop");
  REQUIRE(p.has_value());
  CHECK(p->activity == "Item");
  CHECK_FALSE(d.restore_task("nope").has_value());
}

TEST_CASE("state save and restore") {
  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "Home"), false);
  auto saved = d.state();
  auto digest = d.state_digest();
  d.launch_intent(component_intent("shop", "Item", {{"id", "1"}}), false);
  CHECK(d.state_digest() != digest);
  d.restore(saved);
  CHECK(d.state_digest() == digest);
}

TEST_CASE("command queue serializes concurrent callers") {
  Device d(sample_apps());
  d.launch_intent(component_intent("shop", "SearchResults", {{"q", "x"}}), false);
  DeviceCommandQueue q(d);
  std::vector<std::thread> ts;
  for (int t = 0; t < 8; ++t)
    ts.emplace_back([&] {
      for (int i = 0; i < 25; ++i)
        q.run([](Device& dev) {
          dev.apply_gesture(Scroll{ScrollDirection::down, 1});
          dev.apply_gesture(Scroll{ScrollDirection::up, 1});
          return 0;
        });
    });
  for (auto& t : ts) t.join();
  CHECK(q.run([](Device& dev) { return dev.snapshot().scroll_offset; }) == 0);
}

TEST_CASE("fixture validation") {
  auto app = shop_app();
  app.activities[0].nodes[0].bounds = {0, 0, 2000, 10};
  CHECK_THROWS_AS(Device({app}), Error);
  auto dup = shop_app();
  CHECK_THROWS_AS(Device({dup, shop_app()}), Error);
  auto bad_home = shop_app();
  bad_home.home_activity = "Missing";
  CHECK_THROWS_AS(Device({bad_home}), Error);
}

TEST_CASE("uri templates") {
  UriTemplate t("app://shop/search/{q}");
  CHECK(t.expand({{"q", "Evian spray"}}) == "app://shop/search/Evian%20spray");
  auto m = t.match("app://shop/search/Evian%20spray");
  REQUIRE(m.has_value());
  CHECK(m->at("q") == "Evian spray");
  CHECK_FALSE(t.match("app://shop/search").has_value());
  CHECK_FALSE(t.match("app://food/search/x").has_value());
  CHECK_THROWS_AS(UriTemplate("not a uri"), Error);
}
