#include <random>

#include "doctest.h"
#include "edgeagent/clone/clone.hpp"
#include "edgeagent/error.hpp"
#include "edgeagent/host/runtime.hpp"
#include "edgeagent/text.hpp"
#include "support/dump_gen.hpp"
#include "support/fixtures.hpp"
#include "support/tempdir.hpp"

using namespace edgeagent;
using clone::CaptureMethod;
using clone::ReplayTier;

namespace {

std::vector<sim::SimApp> food_apps() {
  return host::load_scenario(std::string(EDGEAGENT_SCENARIO_DIR) + "/demo_c.json").apps;
}

/// Home, then three taps down to the flash-sale page.
void walk_to_flash_sale(sim::Device& d) {
  REQUIRE(d.launch_intent(testing::component_intent("food", "Home"), false).ok());
  for (Point p : {Point{280, 500}, Point{540, 500}, Point{540, 500}}) REQUIRE(d.apply_gesture(sim::Tap{p}).changed);
  REQUIRE(d.foreground()->activity == "FlashSale");
}

clone::Bookmark flash_sale_bookmark(sim::Device& d) {
  clone::Bookmark b;
  b.name = "flash";
  b.descriptor = clone::introspect_entry("food", [&] { return d.dumpsys_activity(); });
  b.signature = clone::page_signature(*d.foreground_page());
  return b;
}

std::vector<ReplayTier> tiers_of(const clone::ReplayOutcome& o) {
  std::vector<ReplayTier> out;
  for (const auto& a : o.attempts) out.push_back(a.tier);
  return out;
}

bool is_tier_prefix(const std::vector<ReplayTier>& tiers) {
  static const ReplayTier order[] = {ReplayTier::full_intent, ReplayTier::deeplink, ReplayTier::bare_component,
                                     ReplayTier::task_stack_restore};
  if (tiers.empty() || tiers.size() > 4) return false;
  for (size_t i = 0; i < tiers.size(); ++i)
    if (tiers[i] != order[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("parse_dump on two apps with stacks of depth 2 and 1") {
  sim::Device d(testing::sample_apps());
  d.launch_intent(testing::component_intent("shop", "Home"), false);
  d.apply_gesture(sim::Tap{testing::center_of(d.snapshot().ui_root, "search")});
  d.launch_intent(testing::component_intent("gallery", "Picker"), false);
  auto parsed = clone::parse_dump(d.dumpsys_activity());
  REQUIRE(parsed.records.size() == 3);
  CHECK(parsed.warnings.empty());
  CHECK(parsed.records[0].activity == "Home");
  CHECK(parsed.records[1].activity == "SearchResults");
  CHECK(parsed.records[1].intent.extras.at("q") == "Evian spray");
  CHECK(parsed.records[2].app_id == "gallery");
  CHECK(parsed.records[0].task_id == 1);
  CHECK(parsed.records[2].task_id == 2);
  CHECK(parsed.records[2].block == 2);

  CHECK(clone::parse_dump("").records.empty());
}

TEST_CASE("parse_dump reproduces the launch log exactly") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto d = testing::random_launch_device(seed);
    auto parsed = clone::parse_dump(d.dumpsys_activity());
    CHECK(parsed.warnings.empty());
    for (const auto& app : d.apps()) {
      std::vector<sim::IntentMsg> launched, recovered;
      for (const auto& m : d.launch_log())
        if (m.component->app_id == app.app_id) launched.push_back(m);
      for (const auto& r : parsed.records)
        if (r.app_id == app.app_id) recovered.push_back(r.intent);
      CHECK_MESSAGE(launched == recovered, "seed " << seed << " app " << app.app_id);
    }
  }
}

TEST_CASE("parse_dump is total on noise and mutated dumps") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    std::string noise(rng() % 400, '\0');
    for (auto& c : noise) c = static_cast<char>(rng() % 256);
    CHECK_NOTHROW(clone::parse_dump(noise));
  }
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::string dump = testing::random_launch_device(seed).dumpsys_activity();
    for (int k = 0; k < 5 && !dump.empty(); ++k) dump[rng() % dump.size()] = static_cast<char>(rng() % 256);
    clone::DumpParse p;
    CHECK_NOTHROW(p = clone::parse_dump(dump));
    CHECK_NOTHROW(clone::introspect_entry("shop", [&] { return dump; }));
  }
  auto p = clone::parse_dump("garbage\nTASK x id=zz\n  intent={act=a}\n");
  CHECK(p.records.empty());
  CHECK(p.warnings.size() == 3);
}

TEST_CASE("intent lines with escaped characters") {
  auto m = clone::parse_intent_line("    intent={act=a\\ b dat=- cmp=x/Y extras={k\\,1=v\\=2,e=}}");
  REQUIRE(m);
  CHECK(m->action == "a b");
  CHECK(!m->data_uri);
  CHECK(m->component->flat() == "x/Y");
  CHECK(m->extras == std::map<std::string, std::string>{{"k,1", "v=2"}, {"e", ""}});
  CHECK_FALSE(clone::parse_intent_line("intent={act=a dat=- cmp=x/Y extras={}} trailing"));
  CHECK_FALSE(clone::parse_intent_line("intent={act=a dat=- cmp=x/Y extras={"));
}

TEST_CASE("introspection on a healthy dump uses the keyword filter") {
  sim::Device d(food_apps());
  walk_to_flash_sale(d);
  auto desc = clone::introspect_entry("food", [&] { return d.dumpsys_activity(); });
  CHECK(desc.capture_method == CaptureMethod::keyword_filter);
  const auto& launched = d.launch_log().back();
  CHECK(clone::to_intent(desc) == launched);
  CHECK(desc.data_uri == "app://food/flashsale/midnight");
  CHECK(desc.extras.at("city") == "Shanghai");
}

TEST_CASE("a corrupted TASK line forces the full parse") {
  sim::Device d(food_apps());
  walk_to_flash_sale(d);
  std::string dump = d.dumpsys_activity();
  auto healthy = clone::introspect_entry("food", [&] { return dump; });
  std::string corrupted = dump;
  corrupted.replace(corrupted.find("TASK food"), 9, "TASK f#od");
  CHECK_FALSE(clone::keyword_filter_entry("food", corrupted));
  auto recovered = clone::introspect_entry("food", [&] { return corrupted; });
  CHECK(recovered.capture_method == CaptureMethod::full_parse);
  CHECK(clone::same_launch(recovered, healthy));
}

TEST_CASE("introspecting an app that never ran") {
  sim::Device d(food_apps());
  d.launch_intent(testing::component_intent("launcher", "Home"), false);
  try {
    clone::introspect_entry("food", [&] { return d.dumpsys_activity(); });
    FAIL("expected AppNotRunning");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AppNotRunning);
  }
}

TEST_CASE("keyword filter and full parse agree on fuzzed dumps") {
  size_t agreed = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    std::string dump = testing::random_launch_device(seed).dumpsys_activity();
    for (const char* app : {"shop", "gallery", "nobody"}) {
      auto kw = clone::keyword_filter_entry(app, dump);
      if (!kw) continue;
      auto full = clone::full_parse_entry(app, dump);
      REQUIRE(full);
      CHECK(clone::same_launch(*kw, *full));
      ++agreed;
    }
  }
  CHECK(agreed > 300);
}

TEST_CASE("recording three taps") {
  sim::Device d(food_apps());
  d.launch_intent(testing::component_intent("food", "Home"), false);
  clone::Recorder rec(d);
  rec.start("s");
  CHECK_THROWS_AS(rec.start("s"), Error);
  for (Point p : {Point{280, 500}, Point{540, 500}, Point{540, 500}}) d.apply_gesture(sim::Tap{p});
  auto t = rec.stop("s");
  REQUIRE(t.steps.size() == 3);
  CHECK(t.steps[0].pre_signature.activity == "Home");
  CHECK(t.steps[0].post_activity == "DealsHub");
  CHECK(t.steps[2].post_activity == "FlashSale");
  CHECK(t.final.activity == "FlashSale");
  CHECK(t.final.params.at("event_id") == "midnight");
  for (size_t i = 1; i < t.steps.size(); ++i) CHECK(t.steps[i - 1].timestamp <= t.steps[i].timestamp);

  auto round = clone::trajectory_from_json(clone::to_json(t));
  CHECK(clone::to_json(round) == clone::to_json(t));

  try {
    rec.stop("s");
    FAIL("expected NotRecording");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotRecording);
  }
}

TEST_CASE("an empty recording ends on the current page") {
  sim::Device d(food_apps());
  d.launch_intent(testing::component_intent("food", "Home"), false);
  clone::Recorder rec(d);
  rec.start("s");
  auto t = rec.stop("s");
  CHECK(t.steps.empty());
  CHECK(t.final.activity == "Home");
}

TEST_CASE("distilling a skill card") {
  sim::Device d(food_apps());
  d.launch_intent(testing::component_intent("food", "Home"), false);
  clone::Recorder rec(d);
  rec.start("s");
  for (Point p : {Point{280, 500}, Point{540, 500}, Point{540, 500}}) d.apply_gesture(sim::Tap{p});
  auto t = rec.stop("s");
  auto desc = clone::introspect_entry("food", [&] { return d.dumpsys_activity(); });
  auto sig = clone::page_signature(*d.foreground_page());

  clone::FixturePageSummarizer ok;
  auto card = clone::distill_skill(t, desc, sig, ok, "trace-1", 7);
  CHECK(card.name == "FlashSale: Flash Sale");
  CHECK(card.description == "Flash Sale");
  CHECK(card.triggers == std::vector<std::string>{"flash", "sale"});
  CHECK(card.target_app == "food");
  CHECK(card.entry == desc);
  CHECK(card.trajectory_ref == "trace-1");

  clone::FixturePageSummarizer broken(true);
  CHECK(clone::distill_skill(t, desc, sig, broken, "trace-1", 7).name == "food/FlashSale");

  auto elsewhere = desc;
  elsewhere.component.activity = "Home";
  try {
    clone::distill_skill(t, elsewhere, sig, ok, "trace-1", 7);
    FAIL("expected FinalMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::FinalMismatch);
  }

  auto parsed = clone::parse_skill_card(clone::serialize(card));
  CHECK(clone::serialize(parsed) == clone::serialize(card));
  CHECK(parsed.entry == card.entry);
}

TEST_CASE("page signatures") {
  sim::Device d(food_apps());
  walk_to_flash_sale(d);
  auto sig = clone::page_signature(*d.foreground_page());
  CHECK(sig.top_texts ==
        std::vector<std::string>{"Flash Sale", "Event midnight", "Dumplings 9.90", "Milk tea 5.00", "Grab now"});
  CHECK(sig.digest == clone::signature_digest(sig.activity, sig.top_texts));
  CHECK(clone::signature_validates(sig, *d.foreground_page()));
  auto half = sig;
  half.top_texts = {"Flash Sale", "absent one"};
  CHECK(clone::signature_validates(half, *d.foreground_page()));
  half.top_texts.push_back("absent two");
  CHECK_FALSE(clone::signature_validates(half, *d.foreground_page()));
}

TEST_CASE("replay tier 1 reaches the page in one launch") {
  sim::Device d(food_apps());
  walk_to_flash_sale(d);
  auto b = flash_sale_bookmark(d);
  d.launch_intent(testing::component_intent("launcher", "Home"), false);
  size_t before = d.launch_log().size();
  auto out = clone::replay(b, d);
  CHECK(out.tier_used == ReplayTier::full_intent);
  CHECK(out.attempts.size() == 1);
  CHECK(d.launch_log().size() == before + 1);
  CHECK(clone::signature_validates(b.signature, out.page));
}

TEST_CASE("replay falls to the deeplink tier when the activity is unexported") {
  sim::Device d(food_apps());
  walk_to_flash_sale(d);
  auto b = flash_sale_bookmark(d);
  d.set_exported("food", "FlashSale", false);
  auto out = clone::replay(b, d);
  CHECK(out.tier_used == ReplayTier::deeplink);
  REQUIRE(out.attempts.size() == 2);
  CHECK(out.attempts[0].detail == "NotExported");
  CHECK(out.page.params.at("event_id") == "midnight");
}

TEST_CASE("replay restores the task stack when nothing else works") {
  sim::Device d(food_apps());
  walk_to_flash_sale(d);
  auto b = flash_sale_bookmark(d);
  d.set_exported("food", "FlashSale", false);
  d.set_deeplinks("food", "FlashSale", {});
  d.launch_intent(testing::component_intent("launcher", "Home"), false);

  // Independent check: tiers 1-3 each fail on a scratch copy, tier 4 validates.
  auto scratch = [&] {
    sim::Device copy(d.apps());
    copy.restore(d.state());
    return copy;
  };
  {
    auto c = scratch();
    CHECK_FALSE(c.launch_intent(clone::to_intent(b.descriptor), false).ok());
  }
  {
    auto c = scratch();
    sim::IntentMsg m;
    m.data_uri = b.descriptor.data_uri;
    CHECK_FALSE(c.launch_intent(m, false).ok());
  }
  {
    auto c = scratch();
    sim::IntentMsg m;
    m.action = sim::kActionMain;
    m.component = b.descriptor.component;
    CHECK_FALSE(c.launch_intent(m, false).ok());
  }
  {
    auto c = scratch();
    auto page = c.restore_task("food");
    REQUIRE(page);
    CHECK(clone::signature_validates(b.signature, *page));
  }

  std::string digest = d.state_digest();
  auto out = clone::replay(b, d);
  CHECK(out.tier_used == ReplayTier::task_stack_restore);
  CHECK(out.attempts.size() == 4);
  CHECK(d.foreground()->activity == "FlashSale");
  CHECK(d.state_digest() != digest);
}

TEST_CASE("replay with no way back fails after all four tiers") {
  sim::Device d(food_apps());
  walk_to_flash_sale(d);
  auto b = flash_sale_bookmark(d);
  sim::Device fresh(food_apps());
  fresh.set_exported("food", "FlashSale", false);
  fresh.set_deeplinks("food", "FlashSale", {});
  std::string digest = fresh.state_digest();
  try {
    clone::replay(b, fresh);
    FAIL("expected AllTiersFailed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AllTiersFailed);
  }
  CHECK(fresh.state_digest() == digest);
}

TEST_CASE("attempt logs are always a prefix of the tier order") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    sim::Device d(food_apps());
    walk_to_flash_sale(d);
    auto b = flash_sale_bookmark(d);
    if (rng() % 2) d.set_exported("food", "FlashSale", false);
    if (rng() % 2) d.set_deeplinks("food", "FlashSale", {});
    if (rng() % 3 == 0) d.restore(sim::Device(food_apps()).state());
    if (rng() % 4 == 0) {
      b.signature.top_texts.push_back("never shown");
      b.signature.top_texts.push_back("never shown either");
    }
    if (rng() % 4 == 0) b.signature.activity = "Elsewhere";
    try {
      auto out = clone::replay(b, d);
      auto tiers = tiers_of(out);
      CHECK(is_tier_prefix(tiers));
      CHECK(tiers.back() == out.tier_used);
      CHECK(out.attempts.back().success);
      for (size_t i = 0; i + 1 < out.attempts.size(); ++i) CHECK_FALSE(out.attempts[i].success);
      CHECK(clone::signature_validates(b.signature, out.page));
    } catch (const Error& e) {
      CHECK(e.code() == Errc::AllTiersFailed);
    }
  }
}

TEST_CASE("stores persist records and reload them") {
  testing::TempDir dir;
  sim::Device d(food_apps());
  walk_to_flash_sale(d);
  auto b = flash_sale_bookmark(d);
  b.summary = "multi\nline, with = signs";
  {
    clone::BookmarkStore store(dir.path() / "bookmarks", ".bookmark");
    store.put(b);
    CHECK(store.contains("flash"));
  }
  clone::BookmarkStore reloaded(dir.path() / "bookmarks", ".bookmark");
  REQUIRE(reloaded.size() == 1);
  auto got = reloaded.get("flash");
  REQUIRE(got);
  CHECK(got->descriptor == b.descriptor);
  CHECK(got->signature == b.signature);
  CHECK(got->summary == b.summary);
  CHECK_FALSE(reloaded.get("other"));

  clone::Trajectory t;
  t.session = "s";
  t.final = {"food", "FlashSale", {{"event_id", "midnight"}}};
  std::string id;
  {
    clone::TraceStore traces(dir.path() / "traces");
    id = traces.put(t);
  }
  clone::TraceStore traces(dir.path() / "traces");
  auto back = traces.get(id);
  REQUIRE(back);
  CHECK(back->final.params.at("event_id") == "midnight");
}

TEST_CASE("binding skill parameters") {
  clone::SkillCard card;
  card.entry.data_uri = "app://shop/search/{q}";
  card.entry.component = {"shop", "SearchResults"};
  card.parameters = {"q"};
  auto m = clone::bind_skill(card, {{"q", "evian spray"}});
  REQUIRE(m.data_uri);
  CHECK(m.data_uri->find("{q}") == std::string::npos);
  sim::Device d(testing::sample_apps());
  auto r = d.launch_intent(m, false);
  REQUIRE(r.ok());
  CHECK(r.page->params.at("q") == "evian spray");
}
