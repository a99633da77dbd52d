#include "edgeagent/perception/frame_ring.hpp"

#include <mutex>

#include "edgeagent/error.hpp"

namespace edgeagent::perception {

FrameRing::FrameRing(size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(Errc::InvalidArgument, "ring capacity must be positive");
}

void FrameRing::push(Frame f) {
  bool camera = f.source == FrameSource::camera;
  if (camera != std::holds_alternative<SceneDescriptor>(f.scene))
    throw Error(Errc::InvalidArgument, "camera frames carry descriptors, screen frames screenshot ids");
  std::unique_lock lock(mu_);
  if (!frames_.empty()) {
    if (f.timestamp < frames_.back().timestamp)
      throw Error(Errc::TimestampRegression, "frame " + std::to_string(f.frame_id) + " at " +
                                                 std::to_string(f.timestamp) + " precedes " +
                                                 std::to_string(frames_.back().timestamp));
    if (f.frame_id <= frames_.back().frame_id)
      throw Error(Errc::InvalidArgument, "frame ids must strictly increase");
  }
  if (frames_.size() == capacity_) frames_.pop_front();
  frames_.push_back(std::move(f));
}

std::vector<Frame> FrameRing::snapshot() const {
  std::shared_lock lock(mu_);
  return {frames_.begin(), frames_.end()};
}

size_t FrameRing::size() const {
  std::shared_lock lock(mu_);
  return frames_.size();
}

}  // namespace edgeagent::perception
