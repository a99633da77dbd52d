#include "edgeagent/agent/agent.hpp"

#include <algorithm>
#include <set>

#include "edgeagent/error.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::agent {

using nlohmann::json;

const char* decision_name(DecisionKind k) {
  switch (k) {
    case DecisionKind::act: return "act";
    case DecisionKind::respond: return "respond";
    case DecisionKind::invoke_skill: return "invoke_skill";
    case DecisionKind::done: return "done";
  }
  return "?";
}

const char* outcome_name(RunOutcome o) {
  switch (o) {
    case RunOutcome::completed: return "completed";
    case RunOutcome::responded: return "responded";
    case RunOutcome::exhausted: return "exhausted";
  }
  return "?";
}

Decision Decision::act(sim::DeviceAction a, std::string why) {
  Decision d;
  d.kind = DecisionKind::act;
  d.action = std::move(a);
  d.rationale = std::move(why);
  return d;
}

Decision Decision::respond(std::string text, std::string why) {
  Decision d;
  d.kind = DecisionKind::respond;
  d.response = std::move(text);
  d.rationale = std::move(why);
  return d;
}

Decision Decision::invoke(std::string skill, sim::Params params, std::string why) {
  Decision d;
  d.kind = DecisionKind::invoke_skill;
  d.skill = SkillCall{std::move(skill), std::move(params)};
  d.rationale = std::move(why);
  return d;
}

Decision Decision::done(std::string why) {
  Decision d;
  d.kind = DecisionKind::done;
  d.rationale = std::move(why);
  return d;
}

json to_json(const Decision& d) {
  json j = {{"kind", decision_name(d.kind)}, {"rationale", d.rationale}};
  if (d.action) j["action"] = sim::to_json(*d.action);
  if (d.response) j["response"] = *d.response;
  if (d.skill) j["skill"] = {{"name", d.skill->name}, {"params", d.skill->params}};
  return j;
}

Decision decision_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    std::string why = j.value("rationale", "");
    if (kind == "act") return Decision::act(sim::action_from_json(j.at("action")), why);
    if (kind == "respond") return Decision::respond(j.at("response").get<std::string>(), why);
    if (kind == "invoke_skill")
      return Decision::invoke(j.at("skill").at("name").get<std::string>(),
                              j.at("skill").value("params", sim::Params{}), why);
    if (kind == "done") return Decision::done(why);
    throw Error(Errc::ParseError, "unknown decision kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("decision: ") + e.what());
  }
}

json to_json(const AgentStep& s) {
  return {{"step_index", s.step_index},
          {"observation_digest", s.observation_digest},
          {"decision", to_json(s.decision)},
          {"result", s.result}};
}

std::optional<clone::SkillCard> select_skill(const StructuredIntent& intent,
                                             const std::vector<clone::SkillCard>& registry) {
  auto qt = text::tokenize(intent.expanded_query);
  std::set<std::string> query(qt.begin(), qt.end());
  const clone::SkillCard* best = nullptr;
  size_t best_n = 0;
  for (const auto& card : registry) {
    if (card.target_app != intent.target_app) continue;
    std::set<std::string> tokens;
    for (const auto& t : card.triggers)
      for (auto& tok : text::tokenize(t)) tokens.insert(std::move(tok));
    if (tokens.empty()) continue;
    if (!std::all_of(tokens.begin(), tokens.end(), [&](const std::string& t) { return query.count(t) > 0; }))
      continue;
    size_t n = tokens.size();
    if (!best || n > best_n || (n == best_n && (card.created_at > best->created_at ||
                                                (card.created_at == best->created_at && card.name < best->name)))) {
      best = &card;
      best_n = n;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::optional<PageRule::Then> parse_then(std::string_view s) {
  using T = PageRule::Then;
  static const std::map<std::string, T, std::less<>> names{
      {"done", T::done},   {"tap", T::tap},   {"respond", T::respond}, {"answer", T::answer},
      {"select_all_then_tap", T::select_all_then_tap}, {"back", T::back}, {"scroll", T::scroll}};
  auto it = names.find(s);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

void RuleBook::add_answer(std::string_view question, std::string answer) {
  answers[text::normalize(question)] = std::move(answer);
}

std::optional<std::string> RuleBook::answer_for(std::string_view question) const {
  auto it = answers.find(text::normalize(question));
  if (it == answers.end()) return std::nullopt;
  return it->second;
}

RulePlanner::RulePlanner(const sim::Device& device, RuleBook book, grounding::VisualGrounder& grounder)
    : device_(device), book_(std::move(book)), grounder_(grounder) {}

namespace {

bool text_visible(const sim::Observation& obs, std::string_view wanted) {
  const std::string w = text::normalize(wanted);
  return std::any_of(obs.render_layer.begin(), obs.render_layer.end(),
                     [&](const sim::RenderText& r) { return text::normalize(r.text) == w; });
}

bool is_row(const std::string& node_id) {
  auto p = node_id.rfind("/row");
  if (p == std::string::npos || p + 4 >= node_id.size()) return false;
  return std::all_of(node_id.begin() + static_cast<std::ptrdiff_t>(p + 4), node_id.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

std::optional<Decision> tap_on(const sim::Observation& obs, const std::string& target,
                               grounding::VisualGrounder& grounder, const std::string& why) {
  try {
    auto g = grounding::hybrid_ground(obs, {target, std::nullopt}, grounder);
    return Decision::act(sim::Gesture{sim::Tap{g.point}},
                         why + " (" + grounding::source_name(g.source) + ")");
  } catch (const Error& e) {
    if (e.code() != Errc::NoTarget) throw;
    return std::nullopt;
  }
}

}  // namespace

Decision RulePlanner::enter(const PlannerInput& in) const {
  const auto& intent = in.intent;
  if (auto card = select_skill(intent, in.skills))
    return Decision::invoke(card->name, intent.slots, "skill '" + card->name + "' matches the request");
  if (auto it = book_.routes.find({intent.target_app, intent.action_type}); it != book_.routes.end()) {
    sim::IntentMsg m;
    m.data_uri = sim::UriTemplate(it->second).expand(intent.slots);
    return Decision::act(m, "direct entry by deeplink");
  }
  const sim::SimApp* app = device_.find_app(intent.target_app);
  if (!app) return Decision::respond("I could not find the app for: " + intent.expanded_query, "unknown app");
  sim::IntentMsg m;
  m.action = sim::kActionMain;
  m.component = sim::ComponentName{app->app_id, app->home_activity};
  return Decision::act(m, "open " + app->app_id);
}

std::optional<Decision> RulePlanner::apply_rule(const PageRule& rule, const sim::Observation& obs) const {
  using T = PageRule::Then;
  switch (rule.then) {
    case T::done:
      return Decision::done("rule: " + obs.activity + " reached");
    case T::respond:
      return Decision::respond(rule.target, "rule: scripted response");
    case T::back:
      return Decision::act(sim::Gesture{sim::Back{}}, "rule: back");
    case T::scroll: {
      int rows = 1;
      if (auto n = text::first_number(rule.target)) rows = std::max(1, std::stoi(*n));
      return Decision::act(sim::Gesture{sim::Scroll{sim::ScrollDirection::down, rows}}, "rule: scroll");
    }
    case T::tap:
      return tap_on(obs, rule.target, grounder_, "rule: tap '" + rule.target + "'");
    case T::answer:
      for (const auto& r : obs.render_layer)
        if (auto ans = book_.answer_for(r.text))
          return tap_on(obs, *ans, grounder_, "answer '" + r.text + "' with '" + *ans + "'");
      return std::nullopt;
    case T::select_all_then_tap: {
      std::vector<Point> taps;
      sim::walk(obs.ui_root, [&](const sim::UiNode& n, bool) {
        if (is_row(n.node_id) && n.content_desc != "selected" && !n.bounds.degenerate())
          taps.push_back(n.bounds.center());
      });
      if (!taps.empty())
        return Decision::act(sim::Gesture{sim::MultiTap{taps}},
                             "select " + std::to_string(taps.size()) + " items");
      return tap_on(obs, rule.target, grounder_, "all selected; tap '" + rule.target + "'");
    }
  }
  return std::nullopt;
}

Decision RulePlanner::decide(const PlannerInput& in) {
  const auto& intent = in.intent;
  if (intent.action_type == ActionType::answer) {
    auto ans = book_.answer_for(intent.expanded_query);
    return Decision::respond(ans ? *ans : intent.expanded_query, "nothing to do on the device");
  }
  bool entered = std::any_of(in.history.begin(), in.history.end(), [](const AgentStep& s) {
    return s.decision.kind == DecisionKind::act || s.decision.kind == DecisionKind::invoke_skill;
  });
  if (!entered) return enter(in);
  if (!in.observation) return Decision::done("nothing in the foreground");
  const auto& obs = *in.observation;
  for (const auto& rule : book_.rules) {
    if (!rule.app.empty() && rule.app != obs.app_id) continue;
    if (!rule.activity.empty() && rule.activity != obs.activity) continue;
    if (!rule.when_text.empty() && !text_visible(obs, rule.when_text)) continue;
    if (auto d = apply_rule(rule, obs)) return *d;
  }
  return Decision::done("target page " + obs.activity + " reached");
}

std::string invoke_skill(const clone::SkillCard& card, const sim::Params& params, sim::Device& device,
                         const clone::BookmarkStore* bookmarks) {
  if (bookmarks && card.parameters.empty()) {
    if (auto bm = bookmarks->get(card.name)) {
      try {
        auto out = clone::replay(*bm, device);
        return std::string("replayed via ") + clone::tier_name(out.tier_used) + " to " + out.page.activity;
      } catch (const Error& e) {
        return std::string("error: ") + e.what();
      }
    }
  }
  auto r = device.launch_intent(clone::bind_skill(card, params), false);
  if (r.error) return std::string("error: ") + errc_name(*r.error);
  return "launched " + r.page->activity;
}

namespace {

std::string compress(const sim::Observation& obs) {
  auto sig = clone::page_signature(obs.activity, obs.render_layer);
  std::vector<std::string> top(sig.top_texts.begin(),
                               sig.top_texts.begin() + static_cast<std::ptrdiff_t>(std::min<size_t>(3, sig.top_texts.size())));
  return obs.app_id + "/" + obs.activity + ": " + text::join(top, " | ");
}

std::string execute(const Decision& d, RunContext& ctx) {
  if (d.kind == DecisionKind::invoke_skill) {
    auto it = std::find_if(ctx.skills.begin(), ctx.skills.end(),
                           [&](const clone::SkillCard& c) { return c.name == d.skill->name; });
    if (it == ctx.skills.end()) return "error: unknown skill '" + d.skill->name + "'";
    return invoke_skill(*it, d.skill->params, ctx.device, ctx.bookmarks);
  }
  if (const auto* intent = std::get_if<sim::IntentMsg>(&*d.action)) {
    auto r = ctx.device.launch_intent(*intent, false);
    if (r.error) return std::string("error: ") + errc_name(*r.error);
    return "launched " + r.page->activity;
  }
  try {
    auto r = ctx.device.apply_gesture(std::get<sim::Gesture>(*d.action));
    std::string where = r.page ? r.page->activity : "nothing";
    return std::string(r.changed ? "ok" : "no change") + ": " + where;
  } catch (const Error& e) {
    return std::string("error: ") + e.what();
  }
}

void check_shape(const Decision& d) {
  bool ok = false;
  switch (d.kind) {
    case DecisionKind::act: ok = d.action && !d.response && !d.skill; break;
    case DecisionKind::respond: ok = !d.action && d.response && !d.skill; break;
    case DecisionKind::invoke_skill: ok = !d.action && !d.response && d.skill; break;
    case DecisionKind::done: ok = !d.action && !d.response && !d.skill; break;
  }
  if (!ok) throw Error(Errc::PlannerFailure, std::string("malformed ") + decision_name(d.kind) + " decision");
}

}  // namespace

RunResult run(const StructuredIntent& intent, Planner& planner, RunContext& ctx, memory::WorkingMemory wm,
              int max_steps) {
  if (max_steps < 0) throw Error(Errc::InvalidArgument, "max_steps must be >= 0");
  RunResult res;
  wm = memory::update_working(std::move(wm), memory::GoalSet{intent.expanded_query}, ctx.sessions);
  for (int step = 0; step < max_steps; ++step) {
    std::optional<sim::Observation> obs;
    if (ctx.device.foreground()) {
      obs = ctx.device.snapshot();
      wm = memory::update_working(std::move(wm), memory::ScreenshotRef{obs->screenshot_id}, ctx.sessions);
      wm = memory::update_working(std::move(wm), memory::ObservationNote{compress(*obs)}, ctx.sessions);
    }
    auto context = memory::inject_context(wm, ctx.profile, ctx.memory);

    Decision d;
    try {
      d = planner.decide({intent, obs, context, ctx.skills, res.steps});
    } catch (const std::exception& e) {
      throw Error(Errc::PlannerFailure, e.what());
    }
    check_shape(d);

    AgentStep s;
    s.step_index = step;
    if (obs) s.observation_digest = clone::page_signature(obs->activity, obs->render_layer).digest;
    s.decision = d;
    switch (d.kind) {
      case DecisionKind::act:
      case DecisionKind::invoke_skill:
        s.result = execute(d, ctx);
        wm = memory::update_working(std::move(wm), memory::ActionResult{s.result}, ctx.sessions);
        break;
      case DecisionKind::respond:
        s.result = *d.response;
        wm = memory::update_working(std::move(wm), memory::TurnAdded{{"assistant", *d.response}}, ctx.sessions);
        res.response = d.response;
        res.outcome = RunOutcome::responded;
        break;
      case DecisionKind::done:
        s.result = "done";
        res.outcome = RunOutcome::completed;
        break;
    }
    res.steps.push_back(s);
    if (ctx.on_step) ctx.on_step(s);
    if (d.kind == DecisionKind::respond || d.kind == DecisionKind::done) {
      res.wm = std::move(wm);
      return res;
    }
  }
  res.outcome = RunOutcome::exhausted;
  res.wm = std::move(wm);
  return res;
}

}  // namespace edgeagent::agent
