#pragma once

#include <vector>

#include "edgeagent/types.hpp"

namespace edgeagent::perception {

inline constexpr VirtualMs kDefaultAecWindow = 500;

struct AecResult {
  std::vector<SpeechSegment> mic;
  /// Playback segments that cancelled nothing.
  std::vector<SpeechSegment> residual_playback;
};

/// Transcript-level echo cancellation.
///
/// A mic segment is an echo of a playback segment when their normalized texts
/// are equal and their start times differ by at most `window`. Playback is
/// visited in start-time order; each playback segment cancels at most one mic
/// segment, the earliest still-uncancelled match. Mic order is preserved.
AecResult aec_cancel(const std::vector<SpeechSegment>& mic, const std::vector<SpeechSegment>& playback,
                     VirtualMs window = kDefaultAecWindow);

/// Convenience wrapper returning only the surviving mic segments.
std::vector<SpeechSegment> aec_filter(const std::vector<SpeechSegment>& mic,
                                      const std::vector<SpeechSegment>& playback,
                                      VirtualMs window = kDefaultAecWindow);

}  // namespace edgeagent::perception
