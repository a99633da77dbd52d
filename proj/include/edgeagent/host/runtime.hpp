#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edgeagent/agent/orchestrator.hpp"
#include "edgeagent/clone/clone.hpp"
#include "edgeagent/host/model.hpp"
#include "edgeagent/ingress/ingress.hpp"
#include "json.hpp"

namespace edgeagent::host {

/// A parsed scenario file. The script stays as JSON and is interpreted step
/// by step by run_script().
struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<sim::SimApp> apps;
  std::vector<sim::MediaAsset> media;
  perception::AppRegistry registry;
  agent::RuleBook book;
  std::vector<clone::SkillCard> skills;
  std::vector<perception::Frame> frames;
  std::map<std::string, perception::SceneDescriptor> screen_scenes;
  memory::UserProfile profile;
  std::vector<std::int64_t> summarizer_failures;
  bool summarizer_fail_all = false;
  bool page_summarizer_fails = false;
  nlohmann::json script = nlohmann::json::array();
};

/// Throws Error(ParseError).
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);

struct RuntimeOptions {
  /// Persistence root; a private temporary directory when unset.
  std::optional<std::filesystem::path> root;
  ModelEndpointConfig model;
};

struct CloneResult {
  clone::Trajectory trajectory;
  std::string trace_id;
  clone::LaunchDescriptor descriptor;
  clone::Bookmark bookmark;
  clone::SkillCard card;
};

/// One device plus every service around it, wired per the persistence
/// layout under `root`: skills/, bookmarks/, memory/gallery.md,
/// memory/profile.json, sessions/<id>/, traces/.
class Runtime {
 public:
  Runtime(const Scenario& scenario, RuntimeOptions options = {});
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  const std::filesystem::path& root() const { return root_; }
  bool model_enabled() const { return client_.enabled(); }

  sim::Device& device() { return device_; }
  ingress::Ingress& ingress() { return ingress_; }
  perception::FrameRing& frames() { return frames_; }
  agent::Orchestrator& orchestrator() { return *orchestrator_; }
  clone::Recorder& recorder() { return recorder_; }
  memory::MemoryStore& gallery() { return gallery_; }
  memory::WorkingMemoryStore& sessions() { return sessions_; }
  clone::SkillStore& skills() { return skills_; }
  clone::BookmarkStore& bookmarks() { return bookmarks_; }
  clone::TraceStore& traces() { return traces_; }
  agent::ArtifactStore& artifacts() { return artifacts_; }
  grounding::VisualGrounder& grounder() { return *grounder_; }
  agent::Extractor& extractor() { return *extractor_; }
  agent::Planner& planner() { return *planner_; }

  /// Stops recording and distills the trajectory into a skill card and a
  /// bookmark sharing one name (`name` overrides the distilled one).
  CloneResult clone(const std::string& session, const std::optional<std::string>& name = std::nullopt);
  /// Throws Error(NotFound) for an unknown bookmark, Error(AllTiersFailed).
  clone::ReplayOutcome replay(const std::string& bookmark);
  memory::SyncResult sync_memory();
  void save_profile();

 private:
  std::filesystem::path root_;
  bool owns_root_ = false;
  ModelClient client_;
  sim::Device device_;
  ingress::Ingress ingress_;
  perception::FrameRing frames_;
  perception::FixtureSceneResolver fixture_scenes_;
  std::unique_ptr<perception::SceneResolver> remote_scenes_;
  grounding::FixtureGrounder fixture_grounder_;
  std::unique_ptr<grounding::VisualGrounder> remote_grounder_;
  agent::FixtureExtractor fixture_extractor_;
  std::unique_ptr<agent::Extractor> remote_extractor_;
  memory::FixtureSummarizer fixture_summarizer_;
  std::unique_ptr<memory::Summarizer> remote_summarizer_;
  clone::FixturePageSummarizer fixture_page_summarizer_;
  std::unique_ptr<clone::PageSummarizer> remote_page_summarizer_;
  memory::MemoryStore gallery_;
  memory::WorkingMemoryStore sessions_;
  clone::SkillStore skills_;
  clone::BookmarkStore bookmarks_;
  clone::TraceStore traces_;
  agent::ArtifactStore artifacts_;
  clone::Recorder recorder_;
  perception::SceneResolver* scenes_ = nullptr;
  grounding::VisualGrounder* grounder_ = nullptr;
  agent::Extractor* extractor_ = nullptr;
  memory::Summarizer* summarizer_ = nullptr;
  clone::PageSummarizer* page_summarizer_ = nullptr;
  std::unique_ptr<agent::RulePlanner> rule_planner_;
  std::unique_ptr<agent::Planner> remote_planner_;
  agent::Planner* planner_ = nullptr;
  std::unique_ptr<agent::Orchestrator> orchestrator_;
};

struct ExpectationResult {
  size_t step = 0;
  std::string probe;
  bool passed = false;
  nlohmann::json actual;
  std::string message;
};

struct ScenarioReport {
  std::string name;
  size_t steps_executed = 0;
  std::vector<ExpectationResult> expectations;
  std::vector<std::string> artifacts_written;
  std::vector<agent::TurnReport> turns;

  size_t passed() const;
  size_t failed() const;
  bool ok() const { return failed() == 0; }
};

nlohmann::json to_json(const ScenarioReport& r);

/// Executes the scenario's script against `rt`. Expectation failures and
/// unexpected step errors are reported, never thrown.
ScenarioReport run_script(const Scenario& scenario, Runtime& rt);

/// Loads, builds a runtime and runs the script.
ScenarioReport run_scenario(const std::filesystem::path& path, RuntimeOptions options = {});

}  // namespace edgeagent::host
