#include "edgeagent/host/model.hpp"

#include <cstdlib>

#include "edgeagent/error.hpp"
#include "edgeagent/host/fixture_json.hpp"
#include "httplib.h"

namespace edgeagent::host {

using nlohmann::json;

namespace {
std::atomic<std::uint64_t> g_network_ops{0};
}

std::uint64_t network_operations() { return g_network_ops.load(); }

ModelEndpointConfig ModelEndpointConfig::from_env() {
  const char* v = std::getenv("MODEL_ENDPOINT");
  return from_string(v ? v : "");
}

ModelEndpointConfig ModelEndpointConfig::from_string(std::string_view endpoint) {
  ModelEndpointConfig cfg;
  cfg.base = std::string(endpoint);
  while (!cfg.base.empty() && cfg.base.back() == '/') cfg.base.pop_back();
  cfg.enabled = !cfg.base.empty();
  return cfg;
}

ModelClient::ModelClient(ModelEndpointConfig cfg) : cfg_(std::move(cfg)) {
  if (!cfg_.enabled) return;
  auto sep = cfg_.base.find("://");
  if (sep == std::string::npos) throw Error(Errc::InvalidArgument, "MODEL_ENDPOINT needs a scheme: " + cfg_.base);
  auto slash = cfg_.base.find('/', sep + 3);
  scheme_host_port_ = cfg_.base.substr(0, slash);
  prefix_ = slash == std::string::npos ? "" : cfg_.base.substr(slash);
}

json ModelClient::call(const std::string& op, const json& body) const {
  if (!cfg_.enabled) throw Error(Errc::ModelUnavailable, "model endpoint disabled");
  ++g_network_ops;
  httplib::Client cli(scheme_host_port_);
  const auto secs = cfg_.timeout_ms / 1000;
  const auto usecs = (cfg_.timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  auto res = cli.Post(prefix_ + "/v1/" + op, body.dump(), "application/json");
  if (!res) throw Error(Errc::ModelUnavailable, op + ": " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw Error(Errc::ModelUnavailable, op + ": HTTP " + std::to_string(res->status));
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error(Errc::ModelUnavailable, op + ": " + e.what());
  }
}

std::optional<perception::SceneDescriptor> RemoteSceneResolver::describe(const perception::Frame& frame) {
  json body = {{"frame_id", frame.frame_id}, {"timestamp", frame.timestamp}};
  if (const auto* id = std::get_if<std::string>(&frame.scene)) {
    body["source"] = "screen";
    body["screenshot_id"] = *id;
  } else {
    body["source"] = "camera";
  }
  auto r = client_.call("describe_frame", body);
  if (r.is_null()) return std::nullopt;
  return scene_from_json(r);
}

std::optional<Rect> RemoteGrounder::locate(const std::string& screenshot_id, const std::string& query) {
  auto r = client_.call("locate", {{"screenshot_id", screenshot_id}, {"query", query}});
  if (r.is_null() || !r.contains("bbox") || r.at("bbox").is_null()) return std::nullopt;
  return sim::rect_from_json(r.at("bbox"));
}

std::vector<agent::Record> RemoteExtractor::extract(const sim::Observation& obs, const agent::ExtractionSchema& schema) {
  auto r = client_.call("extract", {{"domain", agent::domain_name(schema.domain)},
                                    {"fields", schema.fields},
                                    {"observation", sim::to_json(obs)}});
  try {
    return r.at("records").get<std::vector<agent::Record>>();
  } catch (const json::exception& e) {
    throw Error(Errc::ModelUnavailable, std::string("extract: ") + e.what());
  }
}

memory::MediaSummary RemoteMediaSummarizer::summarize(const sim::MediaAsset& asset) {
  auto r = client_.call("summarize_media", {{"asset_id", asset.asset_id},
                                            {"filename", asset.filename},
                                            {"folder", asset.folder},
                                            {"captured_at", asset.captured_at},
                                            {"width", asset.width},
                                            {"height", asset.height}});
  try {
    return {r.value("objects", std::vector<std::string>{}), r.value("scene", ""), r.value("event", ""),
            r.value("text", "")};
  } catch (const json::exception& e) {
    throw Error(Errc::ModelUnavailable, std::string("summarize_media: ") + e.what());
  }
}

clone::PageSummarizer::Summary RemotePageSummarizer::summarize_page(const std::string& app_id,
                                                                    const clone::PageSignature& sig) {
  auto r = client_.call("summarize_page", {{"app_id", app_id}, {"signature", clone::to_json(sig)}});
  try {
    return {r.at("name").get<std::string>(), r.at("description").get<std::string>()};
  } catch (const json::exception& e) {
    throw Error(Errc::ModelUnavailable, std::string("summarize_page: ") + e.what());
  }
}

agent::Decision RemotePlanner::decide(const agent::PlannerInput& in) {
  try {
    json skills = json::array();
    for (const auto& s : in.skills) skills.push_back(to_json(s));
    json history = json::array();
    for (const auto& s : in.history) history.push_back(agent::to_json(s));
    json body = {{"intent",
                  {{"expanded_query", in.intent.expanded_query},
                   {"target_app", in.intent.target_app},
                   {"action_type", perception::action_name(in.intent.action_type)},
                   {"slots", in.intent.slots}}},
                 {"observation", in.observation ? sim::to_json(*in.observation) : json(nullptr)},
                 {"context", in.context.render()},
                 {"skills", skills},
                 {"history", history}};
    return agent::decision_from_json(client_.call("decide", body));
  } catch (const Error&) {
    if (fallback_) return fallback_->decide(in);
    throw;
  }
}

}  // namespace edgeagent::host
