#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edgeagent/memory/gallery.hpp"
#include "json.hpp"

namespace edgeagent::memory {

struct Turn {
  std::string role;
  std::string text;
  friend bool operator==(const Turn&, const Turn&) = default;
};

/// Runtime context of one session.
struct WorkingMemory {
  std::string session_id;
  std::string goal;
  int step_index = 0;
  std::vector<Turn> turns;
  std::vector<std::string> screenshot_refs;
  std::vector<std::string> compressed_observations;
  std::string last_action_result;
  std::vector<std::string> artifacts;

  friend bool operator==(const WorkingMemory&, const WorkingMemory&) = default;
};

nlohmann::json to_json(const WorkingMemory& wm);
WorkingMemory working_memory_from_json(const nlohmann::json& j);

struct ObservationNote { std::string text; };
struct ScreenshotRef { std::string screenshot_id; };
struct ActionResult { std::string text; };
struct GoalSet { std::string goal; };
struct TurnAdded { Turn turn; };
struct ArtifactAdded { std::string artifact_id; };
struct Resume {};

using WorkingEvent =
    std::variant<ObservationNote, ScreenshotRef, ActionResult, GoalSet, TurnAdded, ArtifactAdded, Resume>;

/// Persisted working memories keyed by session. Optionally mirrored to
/// `<dir>/<session>/working.json`.
class WorkingMemoryStore {
 public:
  WorkingMemoryStore() = default;
  explicit WorkingMemoryStore(std::filesystem::path dir);

  void persist(const WorkingMemory& wm);
  std::optional<WorkingMemory> load(const std::string& session_id) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, WorkingMemory> sessions_;
  std::optional<std::filesystem::path> dir_;
};

/// Applies one event. Only ActionResult advances step_index; Resume reloads
/// the persisted copy (Error(UnknownSession) if there is none).
WorkingMemory update_working(WorkingMemory wm, const WorkingEvent& event, const WorkingMemoryStore& store);

struct ContextSection {
  std::string name;
  std::vector<std::string> lines;
};

struct ContextBlock {
  std::vector<ContextSection> sections;

  const ContextSection* find(std::string_view name) const;
  std::string render() const;
};

/// Ordered sections: goal, the last `k` compressed observations, top profile
/// tags (only when the profile allows injection), and memory entries
/// relevant to the goal. Read-only with respect to memory.
ContextBlock inject_context(const WorkingMemory& wm, const UserProfile& profile, const MemoryFile& file,
                            int k = 5, int memory_limit = 3);

}  // namespace edgeagent::memory
