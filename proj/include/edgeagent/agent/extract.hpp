#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "edgeagent/agent/agent.hpp"

namespace edgeagent::agent {

enum class Domain { ecommerce, local_service };
const char* domain_name(Domain d);
std::optional<Domain> parse_domain(std::string_view s);

struct ExtractionSchema {
  Domain domain = Domain::ecommerce;
  std::vector<std::string> fields;

  static ExtractionSchema for_domain(Domain d);
  /// Dedup key: "title" or "name".
  const std::string& key_field() const { return fields.front(); }
};

using Record = std::map<std::string, std::string>;

struct SessionArtifact {
  std::string artifact_id;
  ExtractionSchema schema;
  std::vector<Record> records;
  std::vector<std::string> source_screenshots;
  VirtualMs created_at = 0;
};

nlohmann::json to_json(const SessionArtifact& a);
SessionArtifact artifact_from_json(const nlohmann::json& j);
/// Canonical text form (sorted keys, two-space indent).
std::string serialize(const SessionArtifact& a);

/// Maps the visible rows of the current screen to records.
class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual std::vector<Record> extract(const sim::Observation& obs, const ExtractionSchema& schema) = 0;
};

/// Reads the foreground page's items inside the viewport.
class FixtureExtractor : public Extractor {
 public:
  explicit FixtureExtractor(const sim::Device& device) : device_(device) {}
  std::vector<Record> extract(const sim::Observation& obs, const ExtractionSchema& schema) override;

 private:
  const sim::Device& device_;
};

/// Extracts the current viewport, then `passes` times scrolls one screen
/// down and extracts again. Records are deduplicated by the key field,
/// first occurrence kept; missing fields are "". Throws Error(NotScrollable).
SessionArtifact scroll_extract(sim::Device& device, const ExtractionSchema& schema, int passes, Extractor& extractor,
                               std::string artifact_id);

/// Record count plus, for listings with prices, the cheapest and dearest
/// prices quoted exactly as extracted. Throws Error(EmptyArtifact).
std::string summarize(const SessionArtifact& artifact);

/// "first".."tenth", "1st", "2nd", "3rd", "4th"...; 1-based.
std::optional<int> parse_ordinal(std::string_view utterance);

/// Taps the row of the record the utterance points at, grounded on the
/// current screen. If that row is scrolled out of view the decision is the
/// scroll that brings it back. Throws Error(NoArtifact), Error(OrdinalOutOfRange).
Decision resolve_followup(std::string_view utterance, const SessionArtifact* artifact, const sim::Device& device,
                          grounding::VisualGrounder& grounder);

/// Artifacts kept in memory and mirrored under
/// `<root>/sessions/<session>/artifacts/<id>.json`.
class ArtifactStore {
 public:
  ArtifactStore() = default;
  explicit ArtifactStore(std::filesystem::path root) : root_(std::move(root)) {}

  void put(const std::string& session, const SessionArtifact& a);
  std::optional<SessionArtifact> get(const std::string& session, const std::string& artifact_id) const;
  std::optional<std::filesystem::path> path_of(const std::string& session, const std::string& artifact_id) const;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, SessionArtifact> items_;
  std::optional<std::filesystem::path> root_;
};

}  // namespace edgeagent::agent
