#include <random>

#include "doctest.h"
#include "edgeagent/error.hpp"
#include "edgeagent/perception/aec.hpp"
#include "edgeagent/perception/align.hpp"
#include "edgeagent/perception/intent.hpp"
#include "edgeagent/text.hpp"
#include "support/perception_gen.hpp"

using namespace edgeagent;
using namespace edgeagent::perception;

namespace {

Frame cam(std::int64_t id, VirtualMs t, std::vector<std::string> objects = {}) {
  return Frame{id, t, FrameSource::camera, SceneDescriptor{std::move(objects), "", ""}};
}

SpeechSegment mic(std::string text, VirtualMs t) { return {std::move(text), t, t + 300, Channel::mic}; }
SpeechSegment pb(std::string text, VirtualMs t) { return {std::move(text), t, t + 300, Channel::playback}; }

AlignedUtterance aligned(std::string text, std::vector<std::string> objects) {
  AlignedUtterance a;
  a.text = std::move(text);
  a.representative = cam(1, 0, std::move(objects));
  a.frames = {a.representative};
  return a;
}

AppRegistry registry() {
  AppRegistry r;
  r.aliases = {{"Taobao", "shop"}, {"Meituan", "food"}};
  r.defaults = {{ActionType::compose, "editor"}, {ActionType::search, "shop"}};
  return r;
}

}  // namespace

TEST_CASE("ring eviction and regression") {
  FrameRing ring(64);
  CHECK(ring.empty());
  ring.push(cam(1, 0));
  CHECK(ring.size() == 1);
  for (int i = 2; i <= 65; ++i) ring.push(cam(i, i * 10));
  auto frames = ring.snapshot();
  REQUIRE(frames.size() == 64);
  CHECK(frames.front().frame_id == 2);
  CHECK(frames.back().frame_id == 65);
  try {
    ring.push(cam(66, 5));
    FAIL("expected TimestampRegression");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TimestampRegression);
  }
}

TEST_CASE("aec removes echoes only") {
  auto out = aec_filter({mic("check price", 100), mic("now playing song", 120)}, {pb("now playing song", 100)});
  REQUIRE(out.size() == 1);
  CHECK(out[0].text == "check price");
  std::vector<SpeechSegment> m = {mic("hello", 0), mic("world", 50)};
  CHECK(aec_filter(m, {}) == m);
  CHECK(aec_filter({mic("Now playing song!", 2100)}, {pb("now playing song", 100)}).size() == 1);
  CHECK(aec_filter({mic("Now, playing   SONG!", 500)}, {pb("now playing song", 100)}).empty());
}

TEST_CASE("each playback segment cancels at most one mic segment") {
  auto out = aec_filter({mic("hi", 100), mic("hi", 150), mic("hi", 200)}, {pb("hi", 100), pb("hi", 400)});
  REQUIRE(out.size() == 1);
  CHECK(out[0].t_start == 200);
}

TEST_CASE("align picks the nearest frame with ties to the earlier one") {
  std::vector<Frame> fs = {cam(1, 0), cam(2, 1000), cam(3, 2000)};
  auto a = align({"x", 900, 1100}, fs);
  CHECK(a.window_start == -1100);
  CHECK(a.window_end == 1600);
  REQUIRE(a.frames.size() == 2);
  CHECK(a.representative.frame_id == 2);

  auto single = align({"x", 5000, 5000}, std::vector<Frame>{cam(9, 10)});
  CHECK(single.representative.frame_id == 9);
  CHECK(single.frames.size() == 1);

  auto tie = align({"x", 1000, 1000}, std::vector<Frame>{cam(1, 900), cam(2, 1100)});
  CHECK(tie.representative.frame_id == 1);

  FrameRing empty;
  try {
    align({"x", 0, 0}, empty);
    FAIL("expected EmptyRing");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyRing);
  }
}

TEST_CASE("align is insensitive to capacity while the window survives") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    FrameRing big(64), small(16);
    VirtualMs t = 0;
    for (int i = 1; i <= 40; ++i) {
      t += static_cast<VirtualMs>(rng() % 300);
      big.push(cam(i, t));
      small.push(cam(i, t));
    }
    // An utterance at the tail whose window only reaches the newest frames.
    auto frames = small.snapshot();
    Utterance u{"x", frames.back().timestamp - 100, frames.back().timestamp};
    if (u.t0 - 2000 < frames.front().timestamp) continue;
    auto a = align(u, big);
    auto b = align(u, small);
    CHECK(a.representative == b.representative);
    CHECK(a.frames == b.frames);
  }
}

TEST_CASE("understand resolves deixis and answers from the scene") {
  FixtureSceneResolver r;
  auto u = understand(aligned("How much does this cost on Taobao?", {"Evian spray"}), r);
  REQUIRE(std::holds_alternative<ExpandedQuery>(u));
  CHECK(std::get<ExpandedQuery>(u).text == "the user wants to know the price of Evian spray on Taobao");

  auto ans = understand(aligned("what object is this?", {"parrot"}), r);
  REQUIRE(std::holds_alternative<DirectAnswer>(ans));
  CHECK(std::get<DirectAnswer>(ans).text == "parrot");

  try {
    understand(aligned("how much is this", {}), r);
    FAIL("expected UnresolvedDeixis");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnresolvedDeixis);
  }
}

TEST_CASE("resolved queries keep no bare deictic token") {
  FixtureSceneResolver r;
  for (const char* q : {"how much does this cost", "find these on Taobao", "buy it on Taobao", "search this product",
                        "what does it cost on Meituan?"}) {
    auto u = understand(aligned(q, {"green tea"}), r);
    if (auto* e = std::get_if<ExpandedQuery>(&u)) CHECK_FALSE(mentions_deixis(e->text));
  }
}

TEST_CASE("screen frames resolve through the screenshot table") {
  FixtureSceneResolver r;
  r.add_screen("shot-1", SceneDescriptor{{"sneaker"}, "store", ""});
  AlignedUtterance a;
  a.text = "how much is this";
  a.representative = Frame{1, 0, FrameSource::screen, std::string("shot-1")};
  auto u = understand(a, r);
  CHECK(std::get<ExpandedQuery>(u).text == "the user wants to know the price of sneaker");
}

TEST_CASE("decompose maps queries to triples") {
  auto a = decompose("the user wants to know the price of Evian spray on Taobao", registry());
  CHECK(a.target_app == "shop");
  CHECK(a.action_type == ActionType::search);
  CHECK(a.slots == std::map<std::string, std::string>{{"q", "Evian spray"}});

  auto b = decompose("find all parrot-themed photos and generate a highlight album in one click", registry());
  CHECK(b.target_app == "editor");
  CHECK(b.action_type == ActionType::compose);
  CHECK(b.slots.at("theme") == "parrot");

  auto c = decompose("hello", registry());
  CHECK(c.action_type == ActionType::answer);
  CHECK(c.target_app.empty());
  CHECK(c.slots.empty());

  auto d = decompose("take me to the flash sale on Meituan", registry());
  CHECK(d.action_type == ActionType::execute_skill);
  CHECK(d.target_app == "food");
}

TEST_CASE("decompose is total") {
  std::mt19937 rng(1);
  const std::string alphabet = "abc xyz?!-{}\\/\"'on price of open find generate album";
  for (int i = 0; i < 500; ++i) {
    std::string s;
    size_t n = rng() % 60;
    for (size_t k = 0; k < n; ++k) s += alphabet[rng() % alphabet.size()];
    auto intent = decompose(s, registry());
    if (intent.action_type != ActionType::answer) CHECK_FALSE(intent.target_app.empty());
  }
}

TEST_CASE("aec matches the exhaustive pairwise matcher on random mixes") {
  size_t removed = 0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto mix = testing::random_mix(seed);
    auto c = testing::check_aec(mix);
    CHECK_MESSAGE(c.matches_oracle, "seed " << seed);
    CHECK_MESSAGE(c.idempotent, "seed " << seed);
    CHECK_MESSAGE(c.only_echoes_removed, "seed " << seed);
    removed += mix.mic.size() - aec_filter(mix.mic, mix.playback).size();
  }
  CHECK(removed > 200);
}

TEST_CASE("the oracle normalization agrees with the library's") {
  for (const char* s : {"Now, playing   SONG!", " a ! b ", "a-b", "", "  ?? ", "Check\tPrice"})
    CHECK(testing::oracle_norm(s) == text::normalize(s));
}

TEST_CASE("align matches a brute-force window scan on random rings") {
  size_t in_window = 0;
  for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
    auto c = testing::random_align_case(seed);
    CHECK_MESSAGE(testing::check_align(c), "seed " << seed);
    if (testing::oracle_align(c).frames.size() > 1) ++in_window;
  }
  CHECK(in_window > 200);
}
