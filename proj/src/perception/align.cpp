#include "edgeagent/perception/align.hpp"

#include "edgeagent/error.hpp"

namespace edgeagent::perception {

AlignedUtterance align(const Utterance& u, const FrameRing& ring, AlignConfig cfg) {
  return align(u, ring.snapshot(), cfg);
}

AlignedUtterance align(const Utterance& u, const std::vector<Frame>& frames, AlignConfig cfg) {
  if (frames.empty()) throw Error(Errc::EmptyRing, "no frames to align against");
  AlignedUtterance out;
  out.text = u.text;
  out.window_start = u.t0 - cfg.pre;
  out.window_end = u.t1 + cfg.post;

  // Midpoint doubled to stay in integers: |2t - (t0 + t1)|.
  const VirtualMs mid2 = u.t0 + u.t1;
  const Frame* best = nullptr;
  VirtualMs best_dist = 0;
  for (const auto& f : frames) {
    if (f.timestamp < out.window_start || f.timestamp > out.window_end) continue;
    out.frames.push_back(f);
    VirtualMs d = 2 * f.timestamp - mid2;
    if (d < 0) d = -d;
    if (!best || d < best_dist) {
      best = &f;
      best_dist = d;
    }
  }
  if (!best) {
    out.representative = frames.back();
    out.frames = {frames.back()};
  } else {
    out.representative = *best;
  }
  return out;
}

}  // namespace edgeagent::perception
