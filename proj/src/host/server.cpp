#include "edgeagent/host/server.hpp"

#include "edgeagent/error.hpp"
#include "edgeagent/host/fixture_json.hpp"
#include "httplib.h"

namespace edgeagent::host {

using nlohmann::json;

void EventHub::publish(json body) {
  {
    std::lock_guard lock(mu_);
    events_.push_back({next_++, std::move(body)});
    while (events_.size() > 1024) events_.pop_front();
  }
  cv_.notify_all();
}

std::vector<EventHub::Event> EventHub::wait_after(std::uint64_t after, int timeout_ms) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms), [&] { return closed_ || next_ - 1 > after; });
  std::vector<Event> out;
  for (const auto& e : events_)
    if (e.seq > after) out.push_back(e);
  return out;
}

std::uint64_t EventHub::last_seq() const {
  std::lock_guard lock(mu_);
  return next_ - 1;
}

void EventHub::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool EventHub::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

namespace {

int status_for(Errc c) {
  switch (c) {
    case Errc::NotFound: return 404;
    case Errc::NoForeground:
    case Errc::AlreadyRecording:
    case Errc::NotRecording: return 409;
    default: return 400;
  }
}

void reply(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json observation_json(sim::Device& d) {
  if (!d.foreground()) return {{"foreground", nullptr}};
  return {{"foreground", sim::to_json(d.snapshot())}};
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ParseError, "request body is not JSON");
  return j;
}

}  // namespace

Server::Server(Runtime& rt) : rt_(rt), queue_(rt.device()), http_(std::make_unique<httplib::Server>()) {
  rt_.orchestrator().on_step = [this](const std::string& session, const agent::AgentStep& step) {
    events_.publish({{"type", "step"}, {"session", session}, {"step", agent::to_json(step)}});
  };
  // No SO_REUSEPORT: a second server on a taken port must fail to bind.
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  routes();
}

Server::~Server() {
  stop();
  rt_.orchestrator().on_step = nullptr;
}

void Server::routes() {
  // Wraps a handler: runs it on the command queue and maps errors to JSON.
  auto guarded = [this](auto fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        json body = parse_body(req);
        json out = queue_.run([&](sim::Device&) { return fn(req, body); });
        reply(res, out);
      } catch (const Error& e) {
        reply(res, {{"error", e.what()}, {"code", errc_name(e.code())}}, status_for(e.code()));
      } catch (const std::exception& e) {
        reply(res, {{"error", e.what()}, {"code", "InvalidArgument"}}, 400);
      }
    };
  };
  auto screen_event = [this] {
    events_.publish({{"type", "screen"}, {"observation", observation_json(rt_.device())}});
  };

  http_->Get("/observation", guarded([this](const httplib::Request&, const json&) {
    return observation_json(rt_.device());
  }));

  http_->Post("/gesture", guarded([this, screen_event](const httplib::Request&, const json& body) {
    auto r = rt_.device().apply_gesture(sim::gesture_from_json(body));
    screen_event();
    json out = observation_json(rt_.device());
    out["changed"] = r.changed;
    return out;
  }));

  http_->Post("/query", guarded([this, screen_event](const httplib::Request&, const json& body) {
    TriggerEvent ev;
    auto src = parse_source(body.value("source", "ui"));
    if (!src) throw Error(Errc::InvalidArgument, "unknown source");
    ev.source = *src;
    ev.timestamp = rt_.device().clock();
    ev.session_id = body.value("session", "default");
    ev.payload = body.at("text").get<std::string>();
    rt_.ingress().submit(ev);
    json turns = json::array();
    for (const auto& t : rt_.orchestrator().drain(rt_.ingress())) {
      json tj = agent::to_json(t);
      events_.publish({{"type", "turn"}, {"turn", tj}});
      turns.push_back(std::move(tj));
    }
    screen_event();
    return json{{"turns", turns}};
  }));

  http_->Post("/record/start", guarded([this](const httplib::Request&, const json& body) {
    std::string session = body.value("session", "default");
    rt_.recorder().start(session);
    events_.publish({{"type", "recording"}, {"session", session}, {"recording", true}});
    return json{{"recording", true}, {"session", session}};
  }));

  http_->Post("/record/stop", guarded([this](const httplib::Request&, const json& body) {
    std::string session = body.value("session", "default");
    std::optional<std::string> name;
    if (body.contains("name")) name = body.at("name").get<std::string>();
    auto r = rt_.clone(session, name);
    events_.publish({{"type", "recording"}, {"session", session}, {"recording", false}});
    return json{{"recording", false},
                {"trajectory", clone::to_json(r.trajectory)},
                {"trace_id", r.trace_id},
                {"skill", to_json(r.card)},
                {"bookmark", to_json(r.bookmark)}};
  }));

  http_->Post(R"(/replay/(.+))", guarded([this, screen_event](const httplib::Request& req, const json&) {
    json res = to_json(rt_.replay(req.matches[1].str()));
    screen_event();
    res["observation"] = observation_json(rt_.device());
    return res;
  }));

  http_->Get("/skills", guarded([this](const httplib::Request&, const json&) {
    json skills = json::array();
    for (const auto& c : rt_.skills().list()) skills.push_back(to_json(c));
    json bookmarks = json::array();
    for (const auto& b : rt_.bookmarks().list()) bookmarks.push_back(to_json(b));
    return json{{"skills", skills}, {"bookmarks", bookmarks}};
  }));

  http_->Get("/memory/entries", guarded([this](const httplib::Request&, const json&) {
    return to_json(rt_.gallery().load());
  }));

  http_->Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t after = events_.last_seq();
    if (req.has_param("since")) {
      const std::string since = req.get_param_value("since");
      if (since.empty() || since.find_first_not_of("0123456789") != std::string::npos || since.size() > 19) {
        reply(res, {{"error", "since must be a sequence number"}, {"code", "InvalidArgument"}}, 400);
        return;
      }
      after = std::stoull(since);
    }
    auto cursor = std::make_shared<std::uint64_t>(after);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, cursor](size_t, httplib::DataSink& sink) {
      for (const auto& e : events_.wait_after(*cursor, 250)) {
        std::string chunk = "id: " + std::to_string(e.seq) + "\ndata: " + e.body.dump() + "\n\n";
        if (!sink.write(chunk.data(), chunk.size())) return false;
        *cursor = e.seq;
      }
      if (events_.closed()) {
        sink.done();
        return false;
      }
      return true;
    });
  });
}

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    int p = http_->bind_to_any_port(host);
    if (p <= 0) throw Error(Errc::PortInUse, "no free port on " + host);
    return p;
  }
  if (!http_->bind_to_port(host, port)) throw Error(Errc::PortInUse, host + ":" + std::to_string(port));
  return port;
}

void Server::listen() { http_->listen_after_bind(); }

void Server::start() {
  thread_ = std::thread([this] { listen(); });
  http_->wait_until_ready();
}

void Server::stop() {
  events_.close();
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace edgeagent::host
