#include "edgeagent/agent/orchestrator.hpp"

#include <algorithm>

#include "edgeagent/error.hpp"
#include "edgeagent/perception/aec.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::agent {

using nlohmann::json;

const char* turn_kind_name(TurnKind k) {
  switch (k) {
    case TurnKind::answer: return "answer";
    case TurnKind::run: return "run";
    case TurnKind::followup: return "followup";
    case TurnKind::memory_sync: return "memory_sync";
    case TurnKind::error: return "error";
  }
  return "?";
}

json to_json(const TurnReport& r) {
  json j = {{"envelope_id", r.envelope_id},
            {"session_id", r.session_id},
            {"kind", turn_kind_name(r.kind)},
            {"utterance", r.utterance},
            {"cancelled_echoes", r.cancelled_echoes.size()},
            {"memory_appended", r.memory_appended}};
  json steps = json::array();
  for (const auto& s : r.steps) steps.push_back(to_json(s));
  j["steps"] = steps;
  if (r.expanded_query) j["expanded_query"] = *r.expanded_query;
  if (r.intent)
    j["intent"] = {{"target_app", r.intent->target_app},
                   {"action_type", perception::action_name(r.intent->action_type)},
                   {"slots", r.intent->slots}};
  if (r.outcome) j["outcome"] = outcome_name(*r.outcome);
  if (r.artifact) j["artifact"] = to_json(*r.artifact);
  if (r.staging) j["staging"] = {{"path", r.staging->path}, {"staged", r.staging->staged}};
  if (r.response) j["response"] = *r.response;
  if (r.error) j["error"] = *r.error;
  return j;
}

Orchestrator::Orchestrator(Services services) : s_(std::move(services)) {}

memory::WorkingMemory Orchestrator::working(const std::string& session_id) const {
  if (auto wm = s_.sessions.load(session_id)) return *wm;
  memory::WorkingMemory wm;
  wm.session_id = session_id;
  return wm;
}

memory::SyncResult Orchestrator::sync_memory() {
  auto result = memory::memory_sync(s_.device, s_.media_summarizer, s_.policy, s_.gallery, profile_);
  profile_ = result.profile;
  return result;
}

std::vector<TurnReport> Orchestrator::drain(ingress::Ingress& ingress) {
  std::vector<TurnReport> out;
  while (auto env = ingress.poll_next()) out.push_back(handle(*env));
  return out;
}

TurnReport Orchestrator::handle(const ingress::RequestEnvelope& env) {
  TurnReport r;
  r.envelope_id = env.envelope_id;
  r.session_id = env.session_id;
  memory::WorkingMemory wm = working(env.session_id);
  try {
    VirtualMs t0 = env.received_at, t1 = env.received_at;
    if (const auto* t = std::get_if<std::string>(&env.normalized_payload)) {
      r.utterance = *t;
    } else {
      const auto& mic = std::get<std::vector<SpeechSegment>>(env.normalized_payload);
      auto aec = perception::aec_cancel(mic, s_.device.state().playback);
      for (const auto& m : mic)
        if (std::find(aec.mic.begin(), aec.mic.end(), m) == aec.mic.end()) r.cancelled_echoes.push_back(m);
      std::vector<std::string> parts;
      for (const auto& seg : aec.mic) parts.push_back(seg.text);
      r.utterance = text::join(parts, " ");
      for (const auto& seg : aec.mic) {
        t0 = &seg == &aec.mic.front() ? seg.t_start : std::min(t0, seg.t_start);
        t1 = &seg == &aec.mic.front() ? seg.t_end : std::max(t1, seg.t_end);
      }
    }
    if (text::trim(r.utterance).empty()) throw Error(Errc::InvalidArgument, "nothing left to act on");
    wm = memory::update_working(std::move(wm), memory::TurnAdded{{"user", r.utterance}}, s_.sessions);
    handle_text(r, wm, t0, t1);
  } catch (const Error& e) {
    r.kind = TurnKind::error;
    r.error = e.what();
    r.error_code = e.code();
  }
  if (r.response) wm = memory::update_working(std::move(wm), memory::TurnAdded{{"assistant", *r.response}}, s_.sessions);
  s_.sessions.persist(wm);
  return r;
}

void Orchestrator::handle_text(TurnReport& r, memory::WorkingMemory& wm, VirtualMs t0, VirtualMs t1) {
  const std::string norm = text::normalize(r.utterance);
  if (norm == "memory sync" || norm == "sync memory") {
    r.kind = TurnKind::memory_sync;
    auto res = sync_memory();
    r.memory_appended = static_cast<int>(res.appended.size());
    r.response = "Indexed " + std::to_string(res.appended.size()) + " new media items.";
    return;
  }
  if (!wm.artifacts.empty() && parse_ordinal(r.utterance)) {
    handle_followup(r, wm);
    return;
  }

  perception::Understanding u;
  if (s_.frames.size() > 0) {
    auto aligned = perception::align({r.utterance, t0, t1}, s_.frames);
    u = perception::understand(aligned, s_.scenes);
  } else {
    if (perception::mentions_deixis(r.utterance))
      throw Error(Errc::UnresolvedDeixis, "no frame to resolve: " + r.utterance);
    u = perception::ExpandedQuery{perception::expand_query(r.utterance)};
  }
  if (const auto* ans = std::get_if<perception::DirectAnswer>(&u)) {
    r.kind = TurnKind::answer;
    r.response = ans->text;
    return;
  }
  r.expanded_query = std::get<perception::ExpandedQuery>(u).text;
  auto intent = perception::decompose(*r.expanded_query, s_.registry);
  run_intent(r, wm, intent);
}

void Orchestrator::run_intent(TurnReport& r, memory::WorkingMemory& wm, const StructuredIntent& given) {
  StructuredIntent intent = given;
  r.kind = TurnKind::run;

  if (intent.action_type == ActionType::compose) {
    auto hits = memory::memory_query(intent.slots.count("theme") ? intent.slots.at("theme") : intent.expanded_query,
                                     s_.gallery.load());
    std::vector<std::string> files;
    for (const auto& h : hits) files.push_back(h.filename);
    r.staging = memory::stage(files, s_.device, r.session_id + "-" + r.envelope_id);
    intent.slots["folder"] = r.staging->path;
  }
  r.intent = intent;

  auto skills = s_.skills.list();
  RunContext ctx{s_.device, skills, &s_.bookmarks, s_.sessions, profile_, s_.gallery.load(), {}};
  const std::string session = r.session_id;
  ctx.on_step = [&](const AgentStep& step) {
    if (on_step) on_step(session, step);
  };
  auto res = run(intent, s_.planner, ctx, wm, max_steps);
  wm = res.wm;
  r.outcome = res.outcome;
  r.steps = res.steps;
  if (res.response) r.response = res.response;

  if (intent.action_type == ActionType::search && res.outcome == RunOutcome::completed) {
    auto page = s_.device.foreground_page();
    if (page && page->scrollable()) {
      const sim::SimApp* app = s_.device.find_app(page->app_id);
      Domain domain = Domain::ecommerce;
      if (app) domain = parse_domain(app->domain).value_or(Domain::ecommerce);
      std::string id = "artifact-" + std::to_string(wm.artifacts.size() + 1);
      auto artifact = scroll_extract(s_.device, ExtractionSchema::for_domain(domain), scroll_passes, s_.extractor, id);
      s_.artifacts.put(r.session_id, artifact);
      wm = memory::update_working(std::move(wm), memory::ArtifactAdded{id}, s_.sessions);
      if (!artifact.records.empty()) r.response = summarize(artifact);
      r.artifact = std::move(artifact);
    }
  }
}

void Orchestrator::handle_followup(TurnReport& r, memory::WorkingMemory& wm) {
  r.kind = TurnKind::followup;
  auto artifact = s_.artifacts.get(r.session_id, wm.artifacts.back());
  // A scroll may be needed before the row can be tapped; a tap ends it.
  for (int i = 0; i < 4; ++i) {
    Decision d = resolve_followup(r.utterance, artifact ? &*artifact : nullptr, s_.device, s_.grounder);
    AgentStep step;
    step.step_index = static_cast<int>(r.steps.size());
    if (s_.device.foreground()) {
      auto obs = s_.device.snapshot();
      step.observation_digest = clone::page_signature(obs.activity, obs.render_layer).digest;
    }
    step.decision = d;
    auto t = s_.device.apply_gesture(std::get<sim::Gesture>(*d.action));
    step.result = std::string(t.changed ? "ok" : "no change") + ": " + (t.page ? t.page->activity : "nothing");
    wm = memory::update_working(std::move(wm), memory::ActionResult{step.result}, s_.sessions);
    r.steps.push_back(step);
    if (on_step) on_step(r.session_id, step);
    if (std::holds_alternative<sim::Tap>(std::get<sim::Gesture>(*d.action))) {
      r.outcome = RunOutcome::completed;
      return;
    }
  }
  r.outcome = RunOutcome::exhausted;
}

}  // namespace edgeagent::agent
