#include "edgeagent/ingress/ingress.hpp"

#include <algorithm>
#include <cctype>

#include "edgeagent/error.hpp"
#include "edgeagent/text.hpp"
#include "json.hpp"

namespace edgeagent::ingress {

GatewayText parse_gateway_message(std::string_view raw) {
  std::string line = text::trim(raw);
  if (!line.empty() && line.front() == '{') {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("from") || !j.contains("text") ||
        !j["from"].is_string() || !j["text"].is_string())
      throw Error(Errc::MalformedGatewayMessage, "expected {\"from\":..,\"text\":..}");
    return {j["from"].get<std::string>(), j["text"].get<std::string>()};
  }
  if (line.rfind("FROM=", 0) != 0) throw Error(Errc::MalformedGatewayMessage, "missing FROM=");
  auto sep = line.find(" TEXT=");
  if (sep == std::string::npos) throw Error(Errc::MalformedGatewayMessage, "missing TEXT=");
  GatewayText out{line.substr(5, sep - 5), line.substr(sep + 6)};
  if (out.from.empty() || out.from.find(' ') != std::string::npos)
    throw Error(Errc::MalformedGatewayMessage, "FROM must be a single non-empty token");
  return out;
}

Ingress::Ingress(sim::Device& device) : device_(device) {}

namespace {

// Whitespace-normalized text; identical for every source.
std::string normalize_text(std::string_view s) {
  std::string out;
  bool gap = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      gap = !out.empty();
      continue;
    }
    if (gap) out += ' ';
    gap = false;
    out += c;
  }
  return out;
}

}  // namespace

RequestEnvelope Ingress::submit(const TriggerEvent& t) {
  if (t.session_id.empty()) throw Error(Errc::InvalidArgument, "session_id must be non-empty");
  RequestEnvelope env;
  env.source = t.source;
  env.received_at = t.timestamp;
  env.session_id = t.session_id;
  if (const auto* s = std::get_if<std::string>(&t.payload)) {
    env.normalized_payload = normalize_text(*s);
  } else if (const auto* segs = std::get_if<std::vector<SpeechSegment>>(&t.payload)) {
    env.normalized_payload = *segs;
  } else {
    env.normalized_payload = normalize_text(parse_gateway_message(std::get<GatewayMessage>(t.payload).raw).text);
  }

  std::lock_guard lock(mu_);
  env.envelope_id = "env-" + std::to_string(next_envelope_++);
  Queued q{env, next_seq_++};
  auto pos = std::upper_bound(queue_.begin(), queue_.end(), q, [](const Queued& a, const Queued& b) {
    return a.envelope.received_at < b.envelope.received_at;
  });
  queue_.insert(pos, std::move(q));
  return env;
}

std::optional<RequestEnvelope> Ingress::poll_next() {
  std::lock_guard lock(mu_);
  if (queue_.empty()) return std::nullopt;
  auto env = std::move(queue_.front().envelope);
  queue_.erase(queue_.begin());
  return env;
}

size_t Ingress::size() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

std::string Ingress::register_schedule(const ScheduleRule& rule) {
  if (rule.fire_at < device_.clock())
    throw Error(Errc::PastFireTime, "fire_at " + std::to_string(rule.fire_at) + " is before now");
  sim::AlarmSpec alarm;
  alarm.fire_at = rule.fire_at;
  alarm.repeat_every = rule.repeat_every;
  alarm.payload = TriggerEvent{TriggerSource::schedule, rule.fire_at, rule.payload, rule.session_id};
  return device_.add_alarm(std::move(alarm));
}

std::vector<RequestEnvelope> Ingress::advance_clock(VirtualMs dt) {
  std::vector<RequestEnvelope> out;
  for (auto& e : device_.advance_clock(dt)) {
    e.source = TriggerSource::schedule;
    out.push_back(submit(e));
  }
  return out;
}

}  // namespace edgeagent::ingress
