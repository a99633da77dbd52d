#include <algorithm>

#include "edgeagent/clone/clone.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::clone {

using nlohmann::json;

std::string signature_digest(const std::string& activity, const std::vector<std::string>& top_texts) {
  std::string key = activity;
  for (const auto& t : top_texts) key += "\x1f" + t;
  return text::hex64(text::fnv1a64(key));
}

PageSignature page_signature(const std::string& activity, const std::vector<sim::RenderText>& layer) {
  std::vector<const sim::RenderText*> texts;
  for (const auto& t : layer)
    if (t.origin == sim::TextOrigin::structural && !text::trim(t.text).empty()) texts.push_back(&t);
  std::stable_sort(texts.begin(), texts.end(), [](const sim::RenderText* a, const sim::RenderText* b) {
    if (a->bbox.y != b->bbox.y) return a->bbox.y < b->bbox.y;
    return a->bbox.x < b->bbox.x;
  });
  PageSignature sig;
  sig.activity = activity;
  for (size_t i = 0; i < texts.size() && i < kSignatureTexts; ++i) sig.top_texts.push_back(texts[i]->text);
  sig.digest = signature_digest(sig.activity, sig.top_texts);
  return sig;
}

PageSignature page_signature(const sim::Page& page) { return page_signature(page.activity, page.render_layer); }

bool signature_validates(const PageSignature& sig, const sim::Page& page) {
  if (page.activity != sig.activity) return false;
  if (sig.top_texts.empty()) return true;
  size_t present = 0;
  for (const auto& t : sig.top_texts) {
    bool found = std::any_of(page.render_layer.begin(), page.render_layer.end(),
                             [&](const sim::RenderText& r) { return r.text == t; });
    if (found) ++present;
  }
  return 2 * present >= sig.top_texts.size();
}

json to_json(const PageSignature& s) {
  return {{"activity", s.activity}, {"top_texts", s.top_texts}, {"digest", s.digest}};
}

PageSignature signature_from_json(const json& j) {
  PageSignature s;
  s.activity = j.at("activity").get<std::string>();
  s.top_texts = j.at("top_texts").get<std::vector<std::string>>();
  s.digest = j.value("digest", signature_digest(s.activity, s.top_texts));
  return s;
}

json to_json(const Trajectory& t) {
  json steps = json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"timestamp", s.timestamp},
                     {"pre_signature", to_json(s.pre_signature)},
                     {"action", sim::to_json(s.action)},
                     {"post_activity", s.post_activity}});
  return {{"session", t.session},
          {"steps", steps},
          {"final", {{"app_id", t.final.app_id}, {"activity", t.final.activity}, {"params", t.final.params}}}};
}

Trajectory trajectory_from_json(const json& j) {
  try {
    Trajectory t;
    t.session = j.value("session", "");
    for (const auto& s : j.at("steps"))
      t.steps.push_back({s.at("timestamp").get<VirtualMs>(), signature_from_json(s.at("pre_signature")),
                         sim::action_from_json(s.at("action")), s.at("post_activity").get<std::string>()});
    const auto& f = j.at("final");
    t.final = {f.at("app_id").get<std::string>(), f.at("activity").get<std::string>(),
               f.value("params", sim::Params{})};
    return t;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("trajectory: ") + e.what());
  }
}

Recorder::Recorder(sim::Device& device) : device_(device) { device_.add_observer(this); }

Recorder::~Recorder() { device_.remove_observer(this); }

void Recorder::start(const std::string& session) {
  if (active_) throw Error(Errc::AlreadyRecording, *active_);
  active_ = session;
  steps_.clear();
}

Trajectory Recorder::stop(const std::string& session) {
  if (!active_ || *active_ != session) throw Error(Errc::NotRecording, session);
  Trajectory t;
  t.session = session;
  t.steps = std::move(steps_);
  steps_.clear();
  active_.reset();
  if (auto fg = device_.foreground()) t.final = {fg->app_id, fg->activity, fg->params};
  return t;
}

void Recorder::on_action(const sim::Device& device, const sim::DeviceAction& action,
                         const std::optional<sim::Page>& before) {
  if (!active_) return;
  TraceStep step;
  step.timestamp = device.clock();
  if (before) step.pre_signature = page_signature(*before);
  step.action = action;
  if (auto fg = device.foreground()) step.post_activity = fg->activity;
  steps_.push_back(std::move(step));
}

}  // namespace edgeagent::clone
