#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgeagent/clone/clone.hpp"
#include "edgeagent/grounding/grounding.hpp"
#include "edgeagent/memory/working.hpp"
#include "edgeagent/perception/intent.hpp"
#include "edgeagent/sim/device.hpp"

namespace edgeagent::agent {

using perception::ActionType;
using perception::StructuredIntent;

enum class DecisionKind { act, respond, invoke_skill, done };
const char* decision_name(DecisionKind k);

struct SkillCall {
  std::string name;
  sim::Params params;
};

/// Exactly the field matching `kind` is set.
struct Decision {
  DecisionKind kind = DecisionKind::done;
  std::optional<sim::DeviceAction> action;
  std::optional<std::string> response;
  std::optional<SkillCall> skill;
  std::string rationale;

  static Decision act(sim::DeviceAction a, std::string why);
  static Decision respond(std::string text, std::string why);
  static Decision invoke(std::string skill, sim::Params params, std::string why);
  static Decision done(std::string why);
};

nlohmann::json to_json(const Decision& d);
Decision decision_from_json(const nlohmann::json& j);

struct AgentStep {
  int step_index = 0;
  std::string observation_digest;  // empty when nothing was in the foreground
  Decision decision;
  std::string result;
};

nlohmann::json to_json(const AgentStep& s);

struct PlannerInput {
  const StructuredIntent& intent;
  const std::optional<sim::Observation>& observation;
  const memory::ContextBlock& context;
  const std::vector<clone::SkillCard>& skills;
  const std::vector<AgentStep>& history;
};

class Planner {
 public:
  virtual ~Planner() = default;
  /// May throw; run() reports that as PlannerFailure.
  virtual Decision decide(const PlannerInput& in) = 0;
};

/// Candidates target the intent's app and have every trigger token in the
/// expanded query; most tokens wins, then the newest card, then name.
std::optional<clone::SkillCard> select_skill(const StructuredIntent& intent,
                                             const std::vector<clone::SkillCard>& registry);

/// Page-level script for the rule planner. Empty app/activity/when_text
/// match anything.
struct PageRule {
  enum class Then { done, tap, respond, answer, select_all_then_tap, back, scroll };

  std::string app;
  std::string activity;
  std::string when_text;
  Then then = Then::done;
  std::string target;  // tap target, response text, or the tap after selecting
};

std::optional<PageRule::Then> parse_then(std::string_view s);

struct RuleBook {
  /// Direct-entry deeplink templates per (app, action).
  std::map<std::pair<std::string, ActionType>, std::string> routes;
  std::vector<PageRule> rules;
  /// Scripted answers keyed by normalized question text.
  std::map<std::string, std::string> answers;

  void add_answer(std::string_view question, std::string answer);
  std::optional<std::string> answer_for(std::string_view question) const;
};

/// Deterministic planner: answer intents respond at once; the first step
/// enters the target app (matching skill, then route, then home activity);
/// afterwards page rules fire in order and the run ends when none matches.
class RulePlanner : public Planner {
 public:
  RulePlanner(const sim::Device& device, RuleBook book, grounding::VisualGrounder& grounder);
  Decision decide(const PlannerInput& in) override;

  const RuleBook& book() const { return book_; }

 private:
  Decision enter(const PlannerInput& in) const;
  std::optional<Decision> apply_rule(const PageRule& rule, const sim::Observation& obs) const;

  const sim::Device& device_;
  RuleBook book_;
  grounding::VisualGrounder& grounder_;
};

enum class RunOutcome { completed, responded, exhausted };
const char* outcome_name(RunOutcome o);

struct RunResult {
  RunOutcome outcome = RunOutcome::exhausted;
  std::vector<AgentStep> steps;
  memory::WorkingMemory wm;
  std::optional<std::string> response;
};

/// What a run needs besides the intent and the planner.
struct RunContext {
  sim::Device& device;
  const std::vector<clone::SkillCard>& skills;
  const clone::BookmarkStore* bookmarks = nullptr;  // replay ladder for bookmarked skills
  const memory::WorkingMemoryStore& sessions;
  memory::UserProfile profile;
  memory::MemoryFile memory;
  std::function<void(const AgentStep&)> on_step;
};

/// snapshot -> inject_context -> decide -> execute -> update_working, until
/// done/respond or max_steps. Throws Error(PlannerFailure).
RunResult run(const StructuredIntent& intent, Planner& planner, RunContext& ctx, memory::WorkingMemory wm,
              int max_steps = 20);

/// Executes a skill: the replay ladder when a bookmark of the same name
/// exists and the card takes no parameters, otherwise its bound entry intent.
std::string invoke_skill(const clone::SkillCard& card, const sim::Params& params, sim::Device& device,
                         const clone::BookmarkStore* bookmarks);

}  // namespace edgeagent::agent
