#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edgeagent/sim/device.hpp"
#include "edgeagent/types.hpp"

namespace edgeagent::ingress {

using NormalizedPayload = std::variant<std::string, std::vector<SpeechSegment>>;

/// A trigger after source-specific adaptation.
struct RequestEnvelope {
  std::string envelope_id;
  TriggerSource source = TriggerSource::ui;
  VirtualMs received_at = 0;
  NormalizedPayload normalized_payload;
  std::string session_id;

  friend bool operator==(const RequestEnvelope&, const RequestEnvelope&) = default;
};

/// Parsed loopback gateway message.
struct GatewayText {
  std::string from;
  std::string text;
};

/// Loopback adapter. Accepts the line form `FROM=<id> TEXT=<text>` and the
/// equivalent JSON object `{"from": ..., "text": ...}`.
/// Throws Error(MalformedGatewayMessage).
GatewayText parse_gateway_message(std::string_view raw);

struct ScheduleRule {
  VirtualMs fire_at = 0;
  std::optional<VirtualMs> repeat_every;
  TriggerPayload payload;
  std::string session_id = "default";
};

/// Unified entry point. submit() may be called from any thread; poll_next()
/// has a single consumer.
class Ingress {
 public:
  explicit Ingress(sim::Device& device);

  RequestEnvelope submit(const TriggerEvent& t);
  std::optional<RequestEnvelope> poll_next();
  size_t size() const;

  /// Installs a device alarm whose firings re-enter through submit().
  std::string register_schedule(const ScheduleRule& rule);

  /// Advances the device clock and submits every fired alarm as a schedule
  /// trigger. Returns the envelopes created.
  std::vector<RequestEnvelope> advance_clock(VirtualMs dt);

 private:
  struct Queued {
    RequestEnvelope envelope;
    std::uint64_t seq;
  };

  sim::Device& device_;
  mutable std::mutex mu_;
  std::vector<Queued> queue_;  // sorted by (received_at, seq)
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_envelope_ = 1;
};

}  // namespace edgeagent::ingress
