#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "edgeagent/agent/extract.hpp"
#include "edgeagent/memory/gallery.hpp"
#include "edgeagent/perception/intent.hpp"
#include "json.hpp"

namespace edgeagent::host {

/// Where the optional remote model lives. Disabled means every model
/// interface binds to its deterministic stub.
struct ModelEndpointConfig {
  std::string base;  // e.g. http://127.0.0.1:8000/prefix
  int timeout_ms = 5000;
  bool enabled = false;

  /// Reads MODEL_ENDPOINT; unset or empty leaves the client disabled.
  static ModelEndpointConfig from_env();
  static ModelEndpointConfig from_string(std::string_view endpoint);
};

/// Number of network requests attempted by every ModelClient in the process.
std::uint64_t network_operations();

/// POSTs `{base}/v1/<op>` with a JSON body and expects a JSON reply.
class ModelClient {
 public:
  explicit ModelClient(ModelEndpointConfig cfg);
  bool enabled() const { return cfg_.enabled; }
  const ModelEndpointConfig& config() const { return cfg_; }

  /// Throws Error(ModelUnavailable) when disabled, unreachable, or on a
  /// non-2xx or non-JSON reply.
  nlohmann::json call(const std::string& op, const nlohmann::json& body) const;

 private:
  ModelEndpointConfig cfg_;
  std::string scheme_host_port_;
  std::string prefix_;
};

class RemoteSceneResolver : public perception::SceneResolver {
 public:
  explicit RemoteSceneResolver(const ModelClient& client) : client_(client) {}
  std::optional<perception::SceneDescriptor> describe(const perception::Frame& frame) override;

 private:
  const ModelClient& client_;
};

class RemoteGrounder : public grounding::VisualGrounder {
 public:
  explicit RemoteGrounder(const ModelClient& client) : client_(client) {}
  std::optional<Rect> locate(const std::string& screenshot_id, const std::string& query) override;

 private:
  const ModelClient& client_;
};

class RemoteExtractor : public agent::Extractor {
 public:
  explicit RemoteExtractor(const ModelClient& client) : client_(client) {}
  std::vector<agent::Record> extract(const sim::Observation& obs, const agent::ExtractionSchema& schema) override;

 private:
  const ModelClient& client_;
};

class RemoteMediaSummarizer : public memory::Summarizer {
 public:
  explicit RemoteMediaSummarizer(const ModelClient& client) : client_(client) {}
  memory::MediaSummary summarize(const sim::MediaAsset& asset) override;

 private:
  const ModelClient& client_;
};

class RemotePageSummarizer : public clone::PageSummarizer {
 public:
  explicit RemotePageSummarizer(const ModelClient& client) : client_(client) {}
  Summary summarize_page(const std::string& app_id, const clone::PageSignature& sig) override;

 private:
  const ModelClient& client_;
};

/// Asks the remote model for each decision; on failure defers to
/// `fallback` if there is one, else the error surfaces as PlannerFailure.
class RemotePlanner : public agent::Planner {
 public:
  RemotePlanner(const ModelClient& client, agent::Planner* fallback) : client_(client), fallback_(fallback) {}
  agent::Decision decide(const agent::PlannerInput& in) override;

 private:
  const ModelClient& client_;
  agent::Planner* fallback_;
};

}  // namespace edgeagent::host
