#include <algorithm>

#include "edgeagent/error.hpp"
#include "edgeagent/host/fixture_json.hpp"
#include "edgeagent/host/runtime.hpp"

namespace edgeagent::host {

using nlohmann::json;

size_t ScenarioReport::passed() const {
  return static_cast<size_t>(std::count_if(expectations.begin(), expectations.end(),
                                           [](const ExpectationResult& e) { return e.passed; }));
}

size_t ScenarioReport::failed() const { return expectations.size() - passed(); }

json to_json(const ScenarioReport& r) {
  json ex = json::array();
  for (const auto& e : r.expectations)
    ex.push_back({{"step", e.step}, {"probe", e.probe}, {"passed", e.passed}, {"actual", e.actual},
                  {"message", e.message}});
  json turns = json::array();
  for (const auto& t : r.turns) turns.push_back(agent::to_json(t));
  return {{"name", r.name},
          {"steps_executed", r.steps_executed},
          {"passed", r.passed()},
          {"failed", r.failed()},
          {"expectations", ex},
          {"artifacts_written", r.artifacts_written},
          {"turns", turns}};
}

namespace {

struct ScriptState {
  std::vector<agent::TurnReport> turns;
  std::optional<clone::ReplayOutcome> replay;
  std::optional<CloneResult> cloned;
  std::optional<clone::Trajectory> trajectory;
  std::optional<std::string> last_error;
};

template <typename T, typename F>
const T* latest(const std::vector<agent::TurnReport>& turns, F&& get) {
  for (auto it = turns.rbegin(); it != turns.rend(); ++it)
    if (const T* v = get(*it)) return v;
  return nullptr;
}

json probe_value(const json& step, Runtime& rt, const ScriptState& st) {
  const std::string probe = step.at("probe").get<std::string>();
  auto& dev = rt.device();
  const auto& turns = st.turns;
  auto artifact = latest<agent::SessionArtifact>(
      turns, [](const agent::TurnReport& t) { return t.artifact ? &*t.artifact : nullptr; });
  auto intent = latest<agent::StructuredIntent>(
      turns, [](const agent::TurnReport& t) { return t.intent ? &*t.intent : nullptr; });
  const agent::TurnReport* last = turns.empty() ? nullptr : &turns.back();

  if (probe == "foreground_activity") {
    auto fg = dev.foreground();
    return fg ? json(fg->activity) : json(nullptr);
  }
  if (probe == "foreground_app") {
    auto fg = dev.foreground();
    return fg ? json(fg->app_id) : json(nullptr);
  }
  if (probe == "foreground_param") {
    auto fg = dev.foreground();
    if (!fg) return nullptr;
    auto it = fg->params.find(step.at("key").get<std::string>());
    return it == fg->params.end() ? json(nullptr) : json(it->second);
  }
  if (probe == "artifact_record_count") return artifact ? json(artifact->records.size()) : json(nullptr);
  if (probe == "artifact_field") {
    if (!artifact) return nullptr;
    size_t rank = step.at("record").get<size_t>();
    if (rank < 1 || rank > artifact->records.size()) return nullptr;
    const auto& rec = artifact->records[rank - 1];
    auto it = rec.find(step.at("field").get<std::string>());
    return it == rec.end() ? json(nullptr) : json(it->second);
  }
  if (probe == "artifact_keys") {
    if (!artifact) return nullptr;
    json keys = json::array();
    for (const auto& r : artifact->records) keys.push_back(r.at(artifact->schema.key_field()));
    return keys;
  }
  if (probe == "response") {
    auto r = latest<std::string>(turns, [](const agent::TurnReport& t) { return t.response ? &*t.response : nullptr; });
    return r ? json(*r) : json(nullptr);
  }
  if (probe == "expanded_query") {
    auto q = latest<std::string>(
        turns, [](const agent::TurnReport& t) { return t.expanded_query ? &*t.expanded_query : nullptr; });
    return q ? json(*q) : json(nullptr);
  }
  if (probe == "intent_app") return intent ? json(intent->target_app) : json(nullptr);
  if (probe == "intent_action") return intent ? json(perception::action_name(intent->action_type)) : json(nullptr);
  if (probe == "intent_slot") {
    if (!intent) return nullptr;
    auto it = intent->slots.find(step.at("key").get<std::string>());
    return it == intent->slots.end() ? json(nullptr) : json(it->second);
  }
  if (probe == "turn_kind") return last ? json(agent::turn_kind_name(last->kind)) : json(nullptr);
  if (probe == "outcome") return last && last->outcome ? json(agent::outcome_name(*last->outcome)) : json(nullptr);
  if (probe == "step_count") return last ? json(last->steps.size()) : json(nullptr);
  if (probe == "action_step_count") {
    if (!last) return nullptr;
    return std::count_if(last->steps.begin(), last->steps.end(), [](const agent::AgentStep& s) {
      return s.decision.kind == agent::DecisionKind::act || s.decision.kind == agent::DecisionKind::invoke_skill;
    });
  }
  if (probe == "first_decision") {
    if (!last || last->steps.empty()) return nullptr;
    return agent::decision_name(last->steps.front().decision.kind);
  }
  if (probe == "wm_step_index") {
    auto wm = rt.sessions().load(step.value("session", "default"));
    return wm ? json(wm->step_index) : json(nullptr);
  }
  if (probe == "memory_entry_count") return rt.gallery().load().entries.size();
  if (probe == "memory_fallback_count") {
    auto f = rt.gallery().load();
    return std::count_if(f.entries.begin(), f.entries.end(), [](const memory::MemoryEntry& e) {
      return e.kind == memory::SummaryKind::metadata_fallback;
    });
  }
  if (probe == "memory_cursor") return rt.gallery().load().cursor;
  if (probe == "query_hits") {
    json out = json::array();
    for (const auto& h : memory::memory_query(step.at("query").get<std::string>(), rt.gallery().load()))
      out.push_back(h.filename);
    return out;
  }
  if (probe == "replay_tier") return st.replay ? json(clone::tier_name(st.replay->tier_used)) : json(nullptr);
  if (probe == "replay_attempts") {
    if (!st.replay) return nullptr;
    json out = json::array();
    for (const auto& a : st.replay->attempts) out.push_back(clone::tier_name(a.tier));
    return out;
  }
  if (probe == "queue_length") return rt.ingress().size();
  if (probe == "staged") {
    auto s = latest<memory::StagingResult>(turns, [](const agent::TurnReport& t) { return t.staging ? &*t.staging : nullptr; });
    return s ? json(s->staged) : json(nullptr);
  }
  if (probe == "folder") return dev.folder(step.at("path").get<std::string>());
  if (probe == "last_error") return st.last_error ? json(*st.last_error) : json(nullptr);
  if (probe == "skill_count") return rt.skills().size();
  if (probe == "bookmark_count") return rt.bookmarks().size();
  if (probe == "capture_method")
    return st.cloned ? json(clone::capture_method_name(st.cloned->descriptor.capture_method)) : json(nullptr);
  if (probe == "clone_name") return st.cloned ? json(st.cloned->card.name) : json(nullptr);
  if (probe == "trace_steps") return st.trajectory ? json(st.trajectory->steps.size()) : json(nullptr);
  if (probe == "launch_count") return dev.launch_log().size();
  if (probe == "network_operations") return network_operations();
  throw Error(Errc::InvalidArgument, "unknown probe '" + probe + "'");
}

bool compare(const json& step, const json& actual, std::string& message) {
  auto show = [](const json& v) { return v.dump(); };
  if (step.contains("equals")) {
    const json& want = step.at("equals");
    bool ok = actual == want || (actual.is_number() && want.is_number() && actual.get<double>() == want.get<double>());
    if (!ok) message = "expected " + show(want) + ", got " + show(actual);
    return ok;
  }
  if (step.contains("contains")) {
    const json& want = step.at("contains");
    bool ok = false;
    if (actual.is_string() && want.is_string()) ok = actual.get<std::string>().find(want.get<std::string>()) != std::string::npos;
    if (actual.is_array()) ok = std::find(actual.begin(), actual.end(), want) != actual.end();
    if (!ok) message = show(actual) + " does not contain " + show(want);
    return ok;
  }
  if (step.contains("at_least")) {
    bool ok = actual.is_number() && actual.get<double>() >= step.at("at_least").get<double>();
    if (!ok) message = "expected >= " + show(step.at("at_least")) + ", got " + show(actual);
    return ok;
  }
  if (step.contains("at_most")) {
    bool ok = actual.is_number() && actual.get<double>() <= step.at("at_most").get<double>();
    if (!ok) message = "expected <= " + show(step.at("at_most")) + ", got " + show(actual);
    return ok;
  }
  if (step.contains("is_null")) {
    bool ok = actual.is_null() == step.at("is_null").get<bool>();
    if (!ok) message = "null check failed on " + show(actual);
    return ok;
  }
  message = "expect step has no comparator";
  return false;
}

TriggerEvent trigger_event(const json& step, Runtime& rt) {
  auto src = parse_source(step.value("source", "ui"));
  if (!src) throw Error(Errc::ParseError, "trigger: unknown source");
  TriggerEvent ev;
  ev.source = *src;
  ev.timestamp = step.value("at", rt.device().clock());
  ev.session_id = step.value("session", "default");
  if (step.contains("segments")) {
    ev.payload = rt.device().capture_mic(segments_from_json(step.at("segments")));
  } else if (step.contains("raw")) {
    ev.payload = GatewayMessage{step.at("raw").get<std::string>()};
  } else {
    ev.payload = step.at("text").get<std::string>();
  }
  return ev;
}

void execute(const json& step, Runtime& rt, ScriptState& st) {
  const std::string kind = step.at("step").get<std::string>();
  auto& dev = rt.device();
  auto drain = [&] {
    for (auto& t : rt.orchestrator().drain(rt.ingress())) {
      if (t.error_code) st.last_error = errc_name(*t.error_code);
      st.turns.push_back(std::move(t));
    }
  };
  if (kind == "trigger") {
    rt.ingress().submit(trigger_event(step, rt));
  } else if (kind == "query") {
    rt.ingress().submit(trigger_event(step, rt));
    drain();
  } else if (kind == "drain") {
    drain();
  } else if (kind == "schedule") {
    ingress::ScheduleRule rule;
    rule.fire_at = step.at("fire_at").get<VirtualMs>();
    if (step.contains("repeat_every")) rule.repeat_every = step.at("repeat_every").get<VirtualMs>();
    rule.payload = step.at("text").get<std::string>();
    rule.session_id = step.value("session", "default");
    rt.ingress().register_schedule(rule);
  } else if (kind == "advance_clock") {
    rt.ingress().advance_clock(step.at("ms").get<VirtualMs>());
  } else if (kind == "gesture") {
    dev.apply_gesture(sim::gesture_from_json(step.at("gesture")));
  } else if (kind == "launch") {
    auto r = dev.launch_intent(sim::intent_from_json(step.at("intent")), step.value("privileged", false));
    if (r.error) throw Error(*r.error, "launch failed");
  } else if (kind == "set_playback") {
    dev.set_playback(segments_from_json(step.at("segments"), Channel::playback));
  } else if (kind == "push_frame") {
    rt.frames().push(frame_from_json(step.at("frame")));
  } else if (kind == "record_start") {
    rt.recorder().start(step.value("session", "default"));
  } else if (kind == "record_stop") {
    st.trajectory = rt.recorder().stop(step.value("session", "default"));
    rt.traces().put(*st.trajectory);
  } else if (kind == "clone") {
    std::optional<std::string> name;
    if (step.contains("name")) name = step.at("name").get<std::string>();
    st.cloned = rt.clone(step.value("session", "default"), name);
    st.trajectory = st.cloned->trajectory;
  } else if (kind == "replay") {
    st.replay.reset();
    st.replay = rt.replay(step.at("bookmark").get<std::string>());
  } else if (kind == "set_exported") {
    dev.set_exported(step.at("app").get<std::string>(), step.at("activity").get<std::string>(),
                     step.at("exported").get<bool>());
  } else if (kind == "set_deeplinks") {
    dev.set_deeplinks(step.at("app").get<std::string>(), step.at("activity").get<std::string>(),
                      step.value("patterns", std::vector<std::string>{}));
  } else if (kind == "memory_sync") {
    rt.sync_memory();
  } else if (kind == "add_media") {
    dev.add_media(media_from_json(step.at("asset")));
  } else if (kind == "remove_media") {
    dev.remove_media(step.at("filename").get<std::string>());
  } else {
    throw Error(Errc::ParseError, "unknown step '" + kind + "'");
  }
}

}  // namespace

ScenarioReport run_script(const Scenario& scenario, Runtime& rt) {
  ScenarioReport report;
  report.name = scenario.name;
  ScriptState st;
  for (size_t i = 0; i < scenario.script.size(); ++i) {
    const json& step = scenario.script[i];
    ++report.steps_executed;
    std::string kind = step.value("step", "");
    if (kind == "expect") {
      ExpectationResult e;
      e.step = i;
      e.probe = step.value("probe", "");
      try {
        e.actual = probe_value(step, rt, st);
        e.passed = compare(step, e.actual, e.message);
      } catch (const std::exception& ex) {
        e.message = ex.what();
      }
      if (!e.passed && step.contains("label")) e.message = step.at("label").get<std::string>() + ": " + e.message;
      report.expectations.push_back(std::move(e));
      continue;
    }
    const std::optional<std::string> expected_error =
        step.contains("expect_error") ? std::optional<std::string>(step.at("expect_error").get<std::string>())
                                      : std::nullopt;
    try {
      execute(step, rt, st);
      if (expected_error)
        report.expectations.push_back({i, "step:" + kind, false, nullptr, "expected " + *expected_error});
    } catch (const std::exception& ex) {
      const auto* err = dynamic_cast<const Error*>(&ex);
      st.last_error = err ? errc_name(err->code()) : "Exception";
      if (expected_error) {
        bool ok = *st.last_error == *expected_error;
        report.expectations.push_back({i, "step:" + kind, ok, *st.last_error, ok ? "" : ex.what()});
      } else {
        report.expectations.push_back({i, "step:" + kind, false, nullptr, ex.what()});
      }
    }
  }
  report.turns = st.turns;
  for (const auto& t : st.turns)
    if (t.artifact)
      if (auto p = rt.artifacts().path_of(t.session_id, t.artifact->artifact_id)) report.artifacts_written.push_back(p->string());
  return report;
}

ScenarioReport run_scenario(const std::filesystem::path& path, RuntimeOptions options) {
  Scenario sc = load_scenario(path);
  Runtime rt(sc, std::move(options));
  return run_script(sc, rt);
}

}  // namespace edgeagent::host
