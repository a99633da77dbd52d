#include <fstream>

#include "doctest.h"
#include "edgeagent/error.hpp"
#include "edgeagent/memory/gallery.hpp"
#include "edgeagent/memory/redact.hpp"
#include "edgeagent/memory/working.hpp"
#include "support/fixtures.hpp"
#include "support/gallery.hpp"
#include "support/tempdir.hpp"

using namespace edgeagent;
using namespace edgeagent::memory;
using edgeagent::testing::TempDir;

namespace {

sim::Device device_with(const std::vector<sim::MediaAsset>& media) {
  sim::Device d(testing::sample_apps());
  for (const auto& m : media) d.add_media(m);
  return d;
}

MemoryEntry entry(std::string file, VirtualMs at, std::vector<std::string> objects, std::string scene,
                  std::string event = "") {
  MemoryEntry e;
  e.filename = std::move(file);
  e.captured_at = at;
  e.objects = std::move(objects);
  e.scene = std::move(scene);
  e.event = std::move(event);
  e.free_text = e.scene;
  return e;
}

}  // namespace

TEST_CASE("redaction") {
  auto p = RedactionPolicy::defaults();
  CHECK(redact("call 13812345678 tonight", p) == "call [REDACTED] tonight");
  CHECK(redact("parrot at the beach", p) == "parrot at the beach");
  Redactor r(p);
  std::string two = "13812345678 or 13912345678";
  CHECK(r.count_matches(two) == 2);
  auto out = r.apply(two);
  CHECK(r.count_matches(out) == 0);
  CHECK(out == "[REDACTED] or [REDACTED]");
  CHECK(redact("id 110105199003071234 ok", p) == "id [REDACTED] ok");
  CHECK(redact("home addr: 5 Elm St, near park", p) == "home [REDACTED], near park");
  CHECK(redact("order 123456789012 shipped", p) == "order 123456789012 shipped");
  CHECK_THROWS_AS(Redactor(RedactionPolicy{{"("}, "[X]"}), Error);
  CHECK_THROWS_AS(Redactor(RedactionPolicy{{"a"}, ""}), Error);
}

TEST_CASE("memory file round-trip") {
  MemoryFile f;
  f.cursor = 7;
  f.entries.push_back(entry("a.jpg", 10, {"parrot", "tree"}, "zoo", "trip"));
  auto fb = entry("b.jpg", 20, {}, "");
  fb.kind = SummaryKind::metadata_fallback;
  fb.free_text = "file b.jpg folder DCIM captured 20 size 1x1";
  f.entries.push_back(fb);
  auto text = serialize(f);
  CHECK(text.rfind("# gallery-memory v1\ncursor: 7\n", 0) == 0);
  CHECK(text.find("## a.jpg\n- captured_at: 10\n- kind: model\n- objects: parrot, tree\n- scene: zoo\n- event: trip\n") !=
        std::string::npos);
  CHECK(parse_memory_file(text) == f);
  CHECK_THROWS_AS(parse_memory_file("nonsense"), Error);
}

TEST_CASE("sync appends one model entry per asset") {
  TempDir tmp;
  auto media = testing::random_gallery(1, 5);
  auto d = device_with(media);
  MemoryStore store(tmp.path() / "memory" / "gallery.md");
  FixtureSummarizer s;
  auto r = memory_sync(d, s, RedactionPolicy::defaults(), store, UserProfile{});
  CHECK(r.appended.size() == 5);
  auto f = store.load();
  CHECK(f.entries.size() == 5);
  CHECK(f.cursor == 5);
  for (const auto& e : f.entries) CHECK(e.kind == SummaryKind::model);
  CHECK_FALSE(r.profile.tag_weights.empty());
  for (const auto& [tag, w] : r.profile.tag_weights) {
    CHECK(w >= 1);
    CHECK(tag == text::to_lower(tag));
  }
}

TEST_CASE("a failing summarizer falls back per asset") {
  TempDir tmp;
  auto d = device_with(testing::random_gallery(2, 5));
  MemoryStore store(tmp.path() / "gallery.md");
  FixtureSummarizer s({3});
  memory_sync(d, s, RedactionPolicy::defaults(), store, UserProfile{});
  auto f = store.load();
  REQUIRE(f.entries.size() == 5);
  int fallback = 0;
  for (const auto& e : f.entries)
    if (e.kind == SummaryKind::metadata_fallback) {
      ++fallback;
      CHECK(e.filename == "IMG_1003.jpg");
      CHECK(e.objects.empty());
      CHECK(e.scene.empty());
      CHECK(e.event.empty());
    }
  CHECK(fallback == 1);
}

TEST_CASE("second sync with nothing new is byte-identical") {
  TempDir tmp;
  auto d = device_with(testing::random_gallery(3, 12));
  MemoryStore store(tmp.path() / "gallery.md");
  FixtureSummarizer s;
  auto first = memory_sync(d, s, RedactionPolicy::defaults(), store, UserProfile{});
  auto bytes = store.raw();
  auto second = memory_sync(d, s, RedactionPolicy::defaults(), store, first.profile);
  CHECK(second.appended.empty());
  CHECK(second.profile == first.profile);
  CHECK(store.raw() == bytes);
}

TEST_CASE("sync is incremental") {
  TempDir tmp;
  auto media = testing::random_gallery(4, 6);
  sim::Device d(testing::sample_apps());
  for (int i = 0; i < 4; ++i) d.add_media(media[static_cast<size_t>(i)]);
  MemoryStore store(tmp.path() / "gallery.md");
  FixtureSummarizer s;
  auto p = memory_sync(d, s, RedactionPolicy::defaults(), store, UserProfile{}).profile;
  d.add_media(media[4]);
  d.add_media(media[5]);
  auto r = memory_sync(d, s, RedactionPolicy::defaults(), store, p);
  CHECK(r.appended.size() == 2);
  CHECK(s.calls() == 6);
  CHECK(store.load().cursor == 6);
}

TEST_CASE("disabled gallery memory writes nothing") {
  TempDir tmp;
  auto d = device_with(testing::random_gallery(5, 3));
  MemoryStore store(tmp.path() / "gallery.md");
  FixtureSummarizer s;
  UserProfile off;
  off.enabled = false;
  auto r = memory_sync(d, s, RedactionPolicy::defaults(), store, off);
  CHECK(r.appended.empty());
  CHECK_FALSE(std::filesystem::exists(store.path()));
}

TEST_CASE("unwritable memory file") {
  TempDir tmp;
  std::ofstream(tmp.path() / "blocker") << "x";
  auto d = device_with(testing::random_gallery(6, 2));
  MemoryStore store(tmp.path() / "blocker" / "gallery.md");
  FixtureSummarizer s;
  try {
    memory_sync(d, s, RedactionPolicy::defaults(), store, UserProfile{});
    FAIL("expected StorageWriteFailure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StorageWriteFailure);
  }
}

TEST_CASE("memory query examples") {
  MemoryFile f;
  f.entries = {entry("p1.jpg", 1, {"parrot"}, "zoo"), entry("p2.jpg", 2, {"parrot", "perch"}, "aviary"),
               entry("d3.jpg", 3, {"dog"}, "park"), entry("p7.jpg", 7, {"parrot"}, "garden"),
               entry("e1.jpg", 8, {"parrot"}, "beach"), entry("e2.jpg", 9, {"ball"}, "beach")};
  std::vector<std::string> names;
  for (const auto& h : memory_query("parrot", f)) names.push_back(h.filename);
  CHECK(names == std::vector<std::string>{"e1.jpg", "p7.jpg", "p2.jpg", "p1.jpg"});
  CHECK(memory_query("submarine", f).empty());
  auto hits = memory_query("beach parrot", f);
  REQUIRE(hits.size() >= 2);
  CHECK(hits[0].filename == "e1.jpg");
  CHECK(hits[0].score == 2);
  CHECK(hits == testing::brute_force_query("beach parrot", f));
}

TEST_CASE("memory query matches brute force on random galleries") {
  TempDir tmp;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto d = device_with(testing::random_gallery(seed, 200));
    MemoryStore store(tmp.path() / ("g" + std::to_string(seed) + ".md"));
    FixtureSummarizer s({7, 11, 13});
    memory_sync(d, s, RedactionPolicy::defaults(), store, UserProfile{});
    auto f = store.load();
    for (const char* q : {"parrot", "beach parrot", "zoo trip", "cake birthday kitchen", "file", "nothing here"})
      CHECK(memory_query(q, f) == testing::brute_force_query(q, f));
  }
}

TEST_CASE("synced memory holds no redactable text") {
  TempDir tmp;
  auto d = device_with(testing::random_gallery(9, 120));
  MemoryStore store(tmp.path() / "gallery.md");
  FixtureSummarizer s;
  memory_sync(d, s, RedactionPolicy::defaults(), store, UserProfile{});
  Redactor r(RedactionPolicy::defaults());
  CHECK(r.count_matches(store.raw()) == 0);
  CHECK(store.raw().find("[REDACTED]") != std::string::npos);
}

TEST_CASE("staging reconciles with the media store") {
  auto media = testing::random_gallery(10, 3);
  auto d = device_with(media);
  std::vector<std::string> names = {media[0].filename, media[1].filename, media[2].filename};
  auto all = stage(names, d, "t1");
  CHECK(all.path == "staging/t1/");
  CHECK(d.folder("staging/t1/").size() == 3);

  d.remove_media(media[1].filename);
  auto two = stage(names, d, "t2");
  CHECK(two.staged == std::vector<std::string>{media[0].filename, media[2].filename});
  CHECK(d.folder("staging/t2/") == two.staged);
  CHECK(d.folder("staging/t1/").size() == 3);

  d.remove_media(media[0].filename);
  d.remove_media(media[2].filename);
  try {
    stage(names, d, "t3");
    FAIL("expected EmptyAfterReconcile");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyAfterReconcile);
  }
}

TEST_CASE("consumers never mutate the memory file") {
  TempDir tmp;
  auto d = device_with(testing::random_gallery(11, 20));
  MemoryStore store(tmp.path() / "gallery.md");
  FixtureSummarizer s;
  auto p = memory_sync(d, s, RedactionPolicy::defaults(), store, UserProfile{}).profile;
  auto before = store.raw();
  auto f = store.load();
  auto hits = memory_query("parrot", f);
  std::vector<std::string> names;
  for (const auto& h : hits) names.push_back(h.filename);
  if (!names.empty()) stage(names, d, "t");
  WorkingMemory wm;
  wm.goal = "parrot album";
  inject_context(wm, p, f);
  CHECK(store.raw() == before);
}

TEST_CASE("working memory events") {
  WorkingMemoryStore store;
  WorkingMemory wm;
  wm.session_id = "s";
  wm = update_working(wm, ObservationNote{"a"}, store);
  wm = update_working(wm, ObservationNote{"b"}, store);
  CHECK(wm.compressed_observations.size() == 2);
  CHECK(wm.step_index == 0);
  wm = update_working(wm, GoalSet{"buy spray"}, store);
  for (int i = 0; i < 4; ++i) wm = update_working(wm, ActionResult{"ok"}, store);
  CHECK(wm.step_index == 4);
  store.persist(wm);

  WorkingMemory other;
  other.session_id = "s";
  other.goal = "something else";
  auto resumed = update_working(other, Resume{}, store);
  CHECK(resumed.step_index == 4);
  CHECK(resumed.goal == "buy spray");

  WorkingMemory ghost;
  ghost.session_id = "ghost";
  try {
    update_working(ghost, Resume{}, store);
    FAIL("expected UnknownSession");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownSession);
  }
}

TEST_CASE("working memory persists to disk") {
  TempDir tmp;
  WorkingMemory wm;
  wm.session_id = "s1";
  wm.goal = "g";
  wm.step_index = 3;
  wm.turns = {{"user", "hi"}};
  {
    WorkingMemoryStore store(tmp.path());
    store.persist(wm);
  }
  WorkingMemoryStore reopened(tmp.path());
  auto back = reopened.load("s1");
  REQUIRE(back.has_value());
  CHECK(*back == wm);
  CHECK(working_memory_from_json(to_json(wm)) == wm);
}

TEST_CASE("context injection") {
  WorkingMemory wm;
  wm.goal = "parrot album";
  for (int i = 1; i <= 7; ++i) wm.compressed_observations.push_back("obs" + std::to_string(i));
  UserProfile p;
  p.tag_weights = {{"parrot", 3}, {"zoo", 1}};
  MemoryFile f;
  f.entries = {entry("p1.jpg", 1, {"parrot"}, "zoo")};

  auto block = inject_context(wm, p, f, 5);
  REQUIRE(block.find("observations"));
  CHECK(block.find("observations")->lines == std::vector<std::string>{"obs3", "obs4", "obs5", "obs6", "obs7"});
  REQUIRE(block.find("profile"));
  CHECK(block.find("profile")->lines.front().find("parrot") != std::string::npos);
  REQUIRE(block.find("memory"));
  CHECK(block.sections.front().name == "goal");

  CHECK(inject_context(wm, p, f, 0).find("observations") == nullptr);
  p.inject = false;
  CHECK(inject_context(wm, p, f, 5).find("profile") == nullptr);
  CHECK(block.render().find("[goal]\nparrot album") != std::string::npos);
}
