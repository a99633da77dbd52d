#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "edgeagent/error.hpp"
#include "edgeagent/sim/fixture.hpp"
#include "edgeagent/types.hpp"

namespace edgeagent::sim {

struct Tap {
  Point point;
};
struct MultiTap {
  std::vector<Point> points;
};
enum class ScrollDirection { up, down };
struct Scroll {
  ScrollDirection direction = ScrollDirection::down;
  int rows = 1;
};
struct TypeText {
  std::string node_id;
  std::string text;
};
struct Back {};

using Gesture = std::variant<Tap, MultiTap, Scroll, TypeText, Back>;

nlohmann::json to_json(const Gesture& g);
Gesture gesture_from_json(const nlohmann::json& j);
std::string describe(const Gesture& g);

/// A launch or a gesture: anything that drives the device forward.
using DeviceAction = std::variant<Gesture, IntentMsg>;

nlohmann::json to_json(const DeviceAction& a);
DeviceAction action_from_json(const nlohmann::json& j);

struct MediaDescriptor {
  std::vector<std::string> objects;
  std::string scene;
  std::string event;
};

struct MediaAsset {
  std::int64_t asset_id = 0;
  std::string filename;
  std::string folder;
  VirtualMs captured_at = 0;
  int width = 0;
  int height = 0;
  /// Visible only to model stubs.
  MediaDescriptor truth;
};

struct AlarmSpec {
  std::string alarm_id;
  VirtualMs fire_at = 0;
  std::optional<VirtualMs> repeat_every;
  TriggerEvent payload;
};

struct StackEntry {
  std::string activity;
  Params params;
  int scroll_offset = 0;
  IntentMsg intent;
};

struct Foreground {
  std::string app_id;
  std::string activity;
  Params params;
};

/// The complete mutable state; a value, so it can be saved and restored.
struct DeviceState {
  std::vector<SimApp> installed;
  std::map<std::string, std::vector<StackEntry>> task_stacks;
  std::map<std::string, int> task_ids;
  int next_task_id = 1;
  std::optional<std::string> foreground_app;
  VirtualMs clock = 0;
  std::vector<AlarmSpec> alarms;
  int next_alarm_id = 1;
  std::vector<MediaAsset> media;
  std::vector<SpeechSegment> playback;
  FolderMap folders;
  std::vector<IntentMsg> launch_log;
  std::uint64_t seed = 0;
};

struct LaunchResult {
  std::optional<Page> page;
  std::optional<Errc> error;

  bool ok() const { return page.has_value(); }
};

struct TransitionResult {
  bool changed = false;
  std::optional<Page> page;
};

/// Stored render of a snapshot, keyed by screenshot id.
struct ScreenCapture {
  std::vector<RenderText> render_layer;
  std::map<std::string, Rect> visual_truth;
};

class Device;

/// Notified after every successful gesture or launch.
class DeviceObserver {
 public:
  virtual ~DeviceObserver() = default;
  virtual void on_action(const Device& device, const DeviceAction& action,
                         const std::optional<Page>& before) = 0;
};

/// Deterministic simulated handset. Not internally synchronized; concurrent
/// callers go through DeviceCommandQueue.
class Device {
 public:
  explicit Device(std::vector<SimApp> apps, std::uint64_t seed = 0);

  LaunchResult launch_intent(const IntentMsg& intent, bool privileged);
  TransitionResult apply_gesture(const Gesture& g);
  Observation snapshot() const;
  std::string dumpsys_activity() const;
  std::vector<TriggerEvent> advance_clock(VirtualMs dt);
  std::vector<MediaAsset> media_list(std::int64_t since_id) const;
  void set_playback(std::vector<SpeechSegment> segments);

  /// Microphone capture: user speech plus echoes of the playback track.
  std::vector<SpeechSegment> capture_mic(std::vector<SpeechSegment> user) const;

  std::string add_alarm(AlarmSpec alarm);
  void add_media(MediaAsset asset);
  bool remove_media(std::string_view filename);
  const MediaAsset* find_media(std::string_view filename) const;
  void write_folder(const std::string& path, std::vector<std::string> files);
  std::vector<std::string> folder(const std::string& path) const;

  /// Foregrounds the app's existing task at its top activity.
  std::optional<Page> restore_task(const std::string& app_id);

  std::optional<Page> foreground_page() const;
  std::optional<Foreground> foreground() const;
  const std::vector<StackEntry>* task_stack(const std::string& app_id) const;

  void set_exported(const std::string& app_id, const std::string& activity, bool exported);
  void set_deeplinks(const std::string& app_id, const std::string& activity,
                     std::vector<std::string> patterns);

  const std::vector<SimApp>& apps() const { return state_.installed; }
  const SimApp* find_app(std::string_view app_id) const;
  VirtualMs clock() const { return state_.clock; }
  const std::vector<IntentMsg>& launch_log() const { return state_.launch_log; }

  const DeviceState& state() const { return state_; }
  void restore(DeviceState s);
  /// Hash over the canonical serialization of the state.
  std::string state_digest() const;

  std::optional<ScreenCapture> capture(const std::string& screenshot_id) const;

  void add_observer(DeviceObserver* o);
  void remove_observer(DeviceObserver* o);

 private:
  Page build(const std::string& app_id, const StackEntry& e) const;
  LaunchResult launch(const IntentMsg& intent, bool privileged, bool notify_observers);
  std::optional<std::pair<const SimApp*, const ActivitySpec*>> resolve_deeplink(const std::string& uri,
                                                                                 Params& slots) const;
  TransitionResult tap(Point p, bool notify_single);
  std::optional<Page> apply_effect(const Page& page, const TapEffect& effect);
  void notify(const DeviceAction& a, const std::optional<Page>& before);
  StackEntry* top_entry();
  std::string screenshot_of(const Page& page) const;

  DeviceState state_;
  std::vector<DeviceObserver*> observers_;
  mutable std::map<std::string, ScreenCapture> captures_;
};

/// Serializes all device access through one worker thread.
class DeviceCommandQueue {
 public:
  explicit DeviceCommandQueue(Device& device);
  ~DeviceCommandQueue();
  DeviceCommandQueue(const DeviceCommandQueue&) = delete;
  DeviceCommandQueue& operator=(const DeviceCommandQueue&) = delete;

  template <typename Fn>
  auto submit(Fn fn) -> std::future<decltype(fn(std::declval<Device&>()))> {
    using R = decltype(fn(std::declval<Device&>()));
    auto task = std::make_shared<std::packaged_task<R()>>([this, fn = std::move(fn)]() mutable {
      return fn(device_);
    });
    auto fut = task->get_future();
    {
      std::lock_guard lock(mu_);
      jobs_.emplace_back([task] { (*task)(); });
    }
    cv_.notify_one();
    return fut;
  }

  template <typename Fn>
  auto run(Fn fn) {
    return submit(std::move(fn)).get();
  }

 private:
  void loop();

  Device& device_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  bool stop_ = false;
  std::thread worker_;
};

}  // namespace edgeagent::sim
