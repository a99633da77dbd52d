#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edgeagent/agent/extract.hpp"
#include "edgeagent/ingress/ingress.hpp"
#include "edgeagent/memory/gallery.hpp"
#include "edgeagent/memory/redact.hpp"
#include "edgeagent/perception/frame_ring.hpp"

namespace edgeagent::agent {

enum class TurnKind { answer, run, followup, memory_sync, error };
const char* turn_kind_name(TurnKind k);

/// What one request turned into.
struct TurnReport {
  std::string envelope_id;
  std::string session_id;
  TurnKind kind = TurnKind::error;
  std::string utterance;
  std::vector<SpeechSegment> cancelled_echoes;
  std::optional<std::string> expanded_query;
  std::optional<StructuredIntent> intent;
  std::optional<RunOutcome> outcome;
  std::vector<AgentStep> steps;
  std::optional<SessionArtifact> artifact;
  std::optional<memory::StagingResult> staging;
  std::optional<std::string> response;
  std::optional<std::string> error;  // "Code: detail"
  std::optional<Errc> error_code;
  int memory_appended = 0;
};

nlohmann::json to_json(const TurnReport& r);

/// Everything a session turn may touch. Not owned.
struct Services {
  sim::Device& device;
  perception::FrameRing& frames;
  perception::SceneResolver& scenes;
  perception::AppRegistry registry;
  Planner& planner;
  grounding::VisualGrounder& grounder;
  Extractor& extractor;
  memory::Summarizer& media_summarizer;
  memory::RedactionPolicy policy;
  memory::MemoryStore& gallery;
  memory::WorkingMemoryStore& sessions;
  clone::SkillStore& skills;
  clone::BookmarkStore& bookmarks;
  ArtifactStore& artifacts;
};

/// Routes envelopes through perception, memory and the agent loop.
class Orchestrator {
 public:
  explicit Orchestrator(Services services);

  /// Never throws for request-level failures; they land in the report.
  TurnReport handle(const ingress::RequestEnvelope& env);
  std::vector<TurnReport> drain(ingress::Ingress& ingress);

  memory::SyncResult sync_memory();

  const memory::UserProfile& profile() const { return profile_; }
  void set_profile(memory::UserProfile p) { profile_ = std::move(p); }
  memory::WorkingMemory working(const std::string& session_id) const;

  int scroll_passes = 3;
  int max_steps = 20;
  std::function<void(const std::string& session, const AgentStep&)> on_step;

 private:
  void handle_text(TurnReport& r, memory::WorkingMemory& wm, VirtualMs t0, VirtualMs t1);
  void handle_followup(TurnReport& r, memory::WorkingMemory& wm);
  void run_intent(TurnReport& r, memory::WorkingMemory& wm, const StructuredIntent& intent);

  Services s_;
  memory::UserProfile profile_;
};

}  // namespace edgeagent::agent
