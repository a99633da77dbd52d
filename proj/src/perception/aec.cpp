#include "edgeagent/perception/aec.hpp"

#include <algorithm>
#include <numeric>

#include "edgeagent/text.hpp"

namespace edgeagent::perception {

AecResult aec_cancel(const std::vector<SpeechSegment>& mic, const std::vector<SpeechSegment>& playback,
                     VirtualMs window) {
  std::vector<std::string> mic_norm;
  mic_norm.reserve(mic.size());
  for (const auto& m : mic) mic_norm.push_back(text::normalize(m.text));

  std::vector<size_t> by_start(mic.size());
  std::iota(by_start.begin(), by_start.end(), 0);
  std::stable_sort(by_start.begin(), by_start.end(),
                   [&](size_t a, size_t b) { return mic[a].t_start < mic[b].t_start; });

  std::vector<size_t> pb_order(playback.size());
  std::iota(pb_order.begin(), pb_order.end(), 0);
  std::stable_sort(pb_order.begin(), pb_order.end(),
                   [&](size_t a, size_t b) { return playback[a].t_start < playback[b].t_start; });

  std::vector<bool> cancelled(mic.size(), false);
  std::vector<bool> used(playback.size(), false);
  for (size_t pi : pb_order) {
    const auto& p = playback[pi];
    const std::string norm = text::normalize(p.text);
    for (size_t mi : by_start) {
      if (cancelled[mi] || mic_norm[mi] != norm) continue;
      VirtualMs dt = mic[mi].t_start - p.t_start;
      if (dt < 0) dt = -dt;
      if (dt <= window) {
        cancelled[mi] = true;
        used[pi] = true;
        break;
      }
    }
  }

  AecResult out;
  for (size_t i = 0; i < mic.size(); ++i)
    if (!cancelled[i]) out.mic.push_back(mic[i]);
  for (size_t i = 0; i < playback.size(); ++i)
    if (!used[i]) out.residual_playback.push_back(playback[i]);
  return out;
}

std::vector<SpeechSegment> aec_filter(const std::vector<SpeechSegment>& mic,
                                      const std::vector<SpeechSegment>& playback, VirtualMs window) {
  return aec_cancel(mic, playback, window).mic;
}

}  // namespace edgeagent::perception
