#include "edgeagent/host/runtime.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "edgeagent/error.hpp"
#include "edgeagent/host/fixture_json.hpp"

namespace edgeagent::host {

using nlohmann::json;

Scenario parse_scenario(const json& j) {
  try {
    Scenario s;
    s.name = j.value("name", "scenario");
    s.seed = j.value("seed", std::uint64_t{0});
    for (const auto& a : j.value("apps", json::array())) s.apps.push_back(app_from_json(a));
    for (const auto& m : j.value("media", json::array())) s.media.push_back(media_from_json(m));
    const json aliases_j = j.value("aliases", json::object());
    for (const auto& [alias, app] : aliases_j.items())
      s.registry.aliases.push_back({alias, app.get<std::string>()});
    const json defaults_j = j.value("defaults", json::object());
    for (const auto& [action, app] : defaults_j.items()) {
      auto a = perception::parse_action(action);
      if (!a) throw Error(Errc::ParseError, "defaults: unknown action '" + action + "'");
      s.registry.defaults[*a] = app.get<std::string>();
    }
    for (const auto& r : j.value("routes", json::array())) {
      auto a = perception::parse_action(r.at("action").get<std::string>());
      if (!a) throw Error(Errc::ParseError, "routes: unknown action");
      std::string uri = r.at("uri").get<std::string>();
      (void)sim::UriTemplate{uri};
      s.book.routes[{r.at("app").get<std::string>(), *a}] = uri;
    }
    for (const auto& r : j.value("rules", json::array())) {
      agent::PageRule rule;
      rule.app = r.value("app", "");
      rule.activity = r.value("activity", "");
      rule.when_text = r.value("when_text", "");
      auto then = agent::parse_then(r.at("then").get<std::string>());
      if (!then) throw Error(Errc::ParseError, "rules: unknown action '" + r.at("then").get<std::string>() + "'");
      rule.then = *then;
      rule.target = r.value("target", "");
      s.book.rules.push_back(std::move(rule));
    }
    const json answers_j = j.value("answers", json::object());
    for (const auto& [q, a] : answers_j.items()) s.book.add_answer(q, a.get<std::string>());
    for (const auto& c : j.value("skills", json::array())) s.skills.push_back(skill_from_json(c));
    for (const auto& f : j.value("frames", json::array())) s.frames.push_back(frame_from_json(f));
    const json screen_scenes_j = j.value("screen_scenes", json::object());
    for (const auto& [id, d] : screen_scenes_j.items())
      s.screen_scenes[id] = scene_from_json(d);
    if (j.contains("profile")) {
      const auto& p = j.at("profile");
      s.profile.enabled = p.value("enabled", true);
      s.profile.inject = p.value("inject", true);
    }
    s.summarizer_failures = j.value("summarizer_failures", std::vector<std::int64_t>{});
    s.summarizer_fail_all = j.value("summarizer_fail_all", false);
    s.page_summarizer_fails = j.value("page_summarizer_fails", false);
    s.script = j.value("script", json::array());
    if (!s.script.is_array()) throw Error(Errc::ParseError, "script must be an array");
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, "scenario " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ParseError, "scenario " + path.string() + " is not valid JSON");
  return parse_scenario(j);
}

namespace {

std::filesystem::path make_temp_root() {
  static std::atomic<int> counter{0};
  auto base = std::filesystem::temp_directory_path();
  for (;;) {
    auto p = base / ("edgeagent-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    if (std::filesystem::create_directories(p)) return p;
  }
}

std::filesystem::path resolve_root(const RuntimeOptions& o) {
  if (o.root) {
    std::filesystem::create_directories(*o.root);
    return *o.root;
  }
  return make_temp_root();
}

}  // namespace

Runtime::Runtime(const Scenario& sc, RuntimeOptions options)
    : root_(resolve_root(options)),
      client_(options.model),
      device_(sc.apps, sc.seed),
      ingress_(device_),
      fixture_grounder_(device_),
      fixture_extractor_(device_),
      fixture_summarizer_(sc.summarizer_failures, sc.summarizer_fail_all),
      fixture_page_summarizer_(sc.page_summarizer_fails),
      gallery_(root_ / "memory" / "gallery.md"),
      sessions_(root_ / "sessions"),
      skills_(root_ / "skills", ".skill"),
      bookmarks_(root_ / "bookmarks", ".bookmark"),
      traces_(root_ / "traces"),
      artifacts_(root_),
      recorder_(device_) {
  owns_root_ = !options.root;
  for (const auto& m : sc.media) device_.add_media(m);
  for (const auto& f : sc.frames) frames_.push(f);
  for (const auto& [id, d] : sc.screen_scenes) fixture_scenes_.add_screen(id, d);

  scenes_ = &fixture_scenes_;
  grounder_ = &fixture_grounder_;
  extractor_ = &fixture_extractor_;
  summarizer_ = &fixture_summarizer_;
  page_summarizer_ = &fixture_page_summarizer_;
  if (client_.enabled()) {
    remote_scenes_ = std::make_unique<RemoteSceneResolver>(client_);
    remote_grounder_ = std::make_unique<RemoteGrounder>(client_);
    remote_extractor_ = std::make_unique<RemoteExtractor>(client_);
    remote_summarizer_ = std::make_unique<RemoteMediaSummarizer>(client_);
    remote_page_summarizer_ = std::make_unique<RemotePageSummarizer>(client_);
    scenes_ = remote_scenes_.get();
    grounder_ = remote_grounder_.get();
    extractor_ = remote_extractor_.get();
    summarizer_ = remote_summarizer_.get();
    page_summarizer_ = remote_page_summarizer_.get();
  }

  rule_planner_ = std::make_unique<agent::RulePlanner>(device_, sc.book, *grounder_);
  planner_ = rule_planner_.get();
  if (client_.enabled()) {
    remote_planner_ = std::make_unique<RemotePlanner>(client_, rule_planner_.get());
    planner_ = remote_planner_.get();
  }

  for (const auto& card : sc.skills) skills_.put(card);

  orchestrator_ = std::make_unique<agent::Orchestrator>(agent::Services{
      device_, frames_, *scenes_, sc.registry, *planner_, *grounder_, *extractor_, *summarizer_,
      memory::RedactionPolicy::defaults(), gallery_, sessions_, skills_, bookmarks_, artifacts_});

  memory::UserProfile profile = sc.profile;
  std::ifstream pin(root_ / "memory" / "profile.json");
  if (pin) {
    json p = json::parse(pin, nullptr, false);
    if (!p.is_discarded()) {
      profile.tag_weights = p.value("tag_weights", std::map<std::string, int>{});
      profile.enabled = p.value("enabled", profile.enabled);
      profile.inject = p.value("inject", profile.inject);
    }
  }
  orchestrator_->set_profile(profile);
}

Runtime::~Runtime() {
  if (owns_root_) {
    std::error_code ec;
    std::filesystem::remove_all(root_, ec);
  }
}

CloneResult Runtime::clone(const std::string& session, const std::optional<std::string>& name) {
  CloneResult r;
  r.trajectory = recorder_.stop(session);
  r.trace_id = traces_.put(r.trajectory);
  r.descriptor = clone::introspect_entry(r.trajectory.final.app_id, [this] { return device_.dumpsys_activity(); });
  auto page = device_.foreground_page();
  if (!page) throw Error(Errc::NoForeground, "nothing to clone");
  auto sig = clone::page_signature(*page);
  std::int64_t created = 1;
  for (const auto& c : skills_.list()) created = std::max(created, c.created_at + 1);
  r.card = clone::distill_skill(r.trajectory, r.descriptor, sig, *page_summarizer_, r.trace_id, created);
  if (name) r.card.name = *name;
  r.bookmark = {r.card.name, r.descriptor, sig, r.card.description, created};
  skills_.put(r.card);
  bookmarks_.put(r.bookmark);
  return r;
}

clone::ReplayOutcome Runtime::replay(const std::string& name) {
  auto bm = bookmarks_.get(name);
  if (!bm) throw Error(Errc::NotFound, "bookmark " + name);
  return clone::replay(*bm, device_);
}

memory::SyncResult Runtime::sync_memory() {
  auto r = orchestrator_->sync_memory();
  save_profile();
  return r;
}

void Runtime::save_profile() {
  const auto& p = orchestrator_->profile();
  std::filesystem::create_directories(root_ / "memory");
  std::ofstream out(root_ / "memory" / "profile.json", std::ios::trunc);
  if (!out) throw Error(Errc::StorageWriteFailure, "profile.json");
  out << json{{"tag_weights", p.tag_weights}, {"enabled", p.enabled}, {"inject", p.inject}}.dump(2) << "\n";
}

}  // namespace edgeagent::host
