#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edgeagent/perception/align.hpp"

namespace edgeagent::perception {

/// Looks at a frame and says what is in it.
class SceneResolver {
 public:
  virtual ~SceneResolver() = default;
  virtual std::optional<SceneDescriptor> describe(const Frame& frame) = 0;
};

/// Reads descriptors straight off camera frames; screen frames resolve
/// through a table keyed by screenshot id.
class FixtureSceneResolver : public SceneResolver {
 public:
  void add_screen(std::string screenshot_id, SceneDescriptor d);
  std::optional<SceneDescriptor> describe(const Frame& frame) override;

 private:
  std::map<std::string, SceneDescriptor> screens_;
};

struct DirectAnswer {
  std::string text;
};
struct ExpandedQuery {
  std::string text;
};
using Understanding = std::variant<DirectAnswer, ExpandedQuery>;

/// Resolves deictic references ("this", "these", "it") against the
/// representative frame and rewrites the request into a complete statement of
/// intent, or answers it directly when the scene already holds the answer.
/// Throws Error(UnresolvedDeixis).
Understanding understand(const AlignedUtterance& a, SceneResolver& resolver);

/// True when the text leans on a deictic reference ("this", "these", "it").
bool mentions_deixis(std::string_view text);

/// Query rewrite without a scene (no deixis allowed to remain unresolved).
std::string expand_query(std::string_view query);

enum class ActionType { search, open, execute_skill, compose, answer };
enum class IntentOrigin { rule_stub, remote_model };

const char* action_name(ActionType a);
std::optional<ActionType> parse_action(std::string_view s);

/// The <target app, action type, parameter slots> triple plus provenance.
struct StructuredIntent {
  std::string expanded_query;
  std::string target_app;
  ActionType action_type = ActionType::answer;
  std::map<std::string, std::string> slots;
  IntentOrigin origin = IntentOrigin::rule_stub;

  friend bool operator==(const StructuredIntent&, const StructuredIntent&) = default;
};

struct AppAlias {
  std::string alias;
  std::string app_id;
};

struct AppRegistry {
  std::vector<AppAlias> aliases;
  /// Fallback app per action when the request names none.
  std::map<ActionType, std::string> defaults;
};

/// Rule-table decomposition. Total: every input yields an intent.
StructuredIntent decompose(std::string_view expanded_query, const AppRegistry& registry);

}  // namespace edgeagent::perception
