#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace edgeagent {

/// Virtual milliseconds. The runtime never reads the wall clock.
using VirtualMs = std::int64_t;

enum class Channel { mic, playback };

/// One transcript segment of recognized speech.
struct SpeechSegment {
  std::string text;
  VirtualMs t_start = 0;
  VirtualMs t_end = 0;
  Channel channel = Channel::mic;

  friend bool operator==(const SpeechSegment&, const SpeechSegment&) = default;
};

enum class TriggerSource { ui, floating_widget, microphone, schedule, external_gateway };

const char* source_name(TriggerSource s);

/// Raw message from an external gateway; adapters translate it to text.
struct GatewayMessage {
  std::string raw;
  friend bool operator==(const GatewayMessage&, const GatewayMessage&) = default;
};

using TriggerPayload = std::variant<std::string, std::vector<SpeechSegment>, GatewayMessage>;

struct TriggerEvent {
  TriggerSource source = TriggerSource::ui;
  VirtualMs timestamp = 0;
  TriggerPayload payload;
  std::string session_id = "default";

  friend bool operator==(const TriggerEvent&, const TriggerEvent&) = default;
};

}  // namespace edgeagent
