#pragma once

#include <string>
#include <vector>

#include "edgeagent/perception/frame_ring.hpp"

namespace edgeagent::perception {

struct Utterance {
  std::string text;
  VirtualMs t0 = 0;
  VirtualMs t1 = 0;
};

struct AlignedUtterance {
  std::string text;
  VirtualMs window_start = 0;
  VirtualMs window_end = 0;
  std::vector<Frame> frames;
  Frame representative;
};

struct AlignConfig {
  VirtualMs pre = 2000;
  VirtualMs post = 500;
};

/// Matches an utterance to the frames inside [t0 - pre, t1 + post]. The
/// representative frame is the one closest to the utterance midpoint, the
/// earlier frame on ties. With no frame in the window the newest frame stands
/// in alone. Throws Error(EmptyRing).
AlignedUtterance align(const Utterance& u, const FrameRing& ring, AlignConfig cfg = {});
AlignedUtterance align(const Utterance& u, const std::vector<Frame>& frames, AlignConfig cfg = {});

}  // namespace edgeagent::perception
