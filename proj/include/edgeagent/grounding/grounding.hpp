#pragma once

#include <optional>
#include <string>

#include "edgeagent/geometry.hpp"
#include "edgeagent/sim/ui.hpp"

namespace edgeagent::sim {
class Device;
}

namespace edgeagent::grounding {

struct TargetSpec {
  std::string query;
  std::optional<sim::Role> role_hint;
};

enum class GroundSource { xml, ocr, visual };
const char* source_name(GroundSource s);

struct GroundingResult {
  Point point;
  Rect bbox;
  GroundSource source = GroundSource::xml;
  std::optional<std::string> matched_node;
  double score = 0.0;

  friend bool operator==(const GroundingResult&, const GroundingResult&) = default;
};

/// Screenshot-level locator of last resort.
class VisualGrounder {
 public:
  virtual ~VisualGrounder() = default;
  virtual std::optional<Rect> locate(const std::string& screenshot_id, const std::string& query) = 0;
};

/// Reads the ground-truth boxes stored with each device capture.
class FixtureGrounder : public VisualGrounder {
 public:
  explicit FixtureGrounder(const sim::Device& device) : device_(device) {}
  std::optional<Rect> locate(const std::string& screenshot_id, const std::string& query) override;

 private:
  const sim::Device& device_;
};

/// Never finds anything.
class NullGrounder : public VisualGrounder {
 public:
  std::optional<Rect> locate(const std::string&, const std::string&) override { return std::nullopt; }
};

/// Fraction score of one text field against the target tokens: 0 unless
/// every target token occurs in the field, else |target| / |field tokens|
/// (distinct tokens on both sides).
double field_score(const std::vector<std::string>& target_tokens, std::string_view field);

/// xml, then ocr, then visual; the first stage with a candidate scoring at
/// least `tau` wins. Within a stage: highest score, then smallest area,
/// topmost, leftmost, document order. Throws Error(NoTarget).
GroundingResult hybrid_ground(const sim::Observation& obs, const TargetSpec& target, VisualGrounder& model,
                              double tau = 0.5);

}  // namespace edgeagent::grounding
