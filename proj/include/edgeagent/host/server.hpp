#pragma once

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "edgeagent/host/runtime.hpp"

namespace httplib {
class Server;
}

namespace edgeagent::host {

/// Fan-out of server-push events; subscribers read by sequence number.
class EventHub {
 public:
  struct Event {
    std::uint64_t seq;
    nlohmann::json body;
  };

  void publish(nlohmann::json body);
  /// Events after `after`, waiting up to `timeout_ms` for the first one.
  std::vector<Event> wait_after(std::uint64_t after, int timeout_ms);
  std::uint64_t last_seq() const;
  void close();
  bool closed() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Event> events_;
  std::uint64_t next_ = 1;
  bool closed_ = false;
};

/// HTTP front end. Every request that touches the runtime is funneled
/// through one command queue, so requests never run concurrently against
/// the device.
class Server {
 public:
  explicit Server(Runtime& rt);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws Error(PortInUse).
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  /// Runs listen() on a background thread.
  void start();
  void stop();

  EventHub& events() { return events_; }

 private:
  void routes();

  Runtime& rt_;
  sim::DeviceCommandQueue queue_;
  EventHub events_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

}  // namespace edgeagent::host
