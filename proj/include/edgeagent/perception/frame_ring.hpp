#pragma once

#include <cstdint>
#include <deque>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "edgeagent/types.hpp"

namespace edgeagent::perception {

struct SceneDescriptor {
  std::vector<std::string> objects;
  std::string scene;
  std::string event;

  bool empty() const { return objects.empty() && scene.empty() && event.empty(); }
  friend bool operator==(const SceneDescriptor&, const SceneDescriptor&) = default;
};

enum class FrameSource { camera, screen };

/// Camera frames carry a scene descriptor; screen frames carry a screenshot id.
struct Frame {
  std::int64_t frame_id = 0;
  VirtualMs timestamp = 0;
  FrameSource source = FrameSource::camera;
  std::variant<SceneDescriptor, std::string> scene;

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr size_t kDefaultRingCapacity = 64;

/// Bounded short-term visual history. One writer, any number of readers;
/// readers take copies via snapshot().
class FrameRing {
 public:
  explicit FrameRing(size_t capacity = kDefaultRingCapacity);

  /// Appends, evicting the oldest frame when full.
  /// Throws Error(TimestampRegression) if `f` is older than the newest frame.
  void push(Frame f);

  std::vector<Frame> snapshot() const;
  size_t size() const;
  size_t capacity() const { return capacity_; }
  bool empty() const { return size() == 0; }

 private:
  size_t capacity_;
  mutable std::shared_mutex mu_;
  std::deque<Frame> frames_;
};

}  // namespace edgeagent::perception
