#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgeagent/sim/ui.hpp"

namespace edgeagent::sim {

inline constexpr const char* kActionView = "android.intent.action.VIEW";
inline constexpr const char* kActionMain = "android.intent.action.MAIN";

struct ComponentName {
  std::string app_id;
  std::string activity;

  std::string flat() const { return app_id + "/" + activity; }
  static std::optional<ComponentName> parse(std::string_view flat);

  friend auto operator<=>(const ComponentName&, const ComponentName&) = default;
};

struct IntentMsg {
  std::string action = kActionView;
  std::optional<std::string> data_uri;
  std::optional<ComponentName> component;
  std::map<std::string, std::string> extras;

  friend bool operator==(const IntentMsg&, const IntentMsg&) = default;
};

nlohmann::json to_json(const IntentMsg& i);
IntentMsg intent_from_json(const nlohmann::json& j);

/// Deeplink template of the form scheme://host/seg/{slot}/... where a
/// placeholder always spans a whole path segment.
class UriTemplate {
 public:
  /// Throws Error(InvalidArgument) on malformed templates.
  explicit UriTemplate(std::string_view pattern);

  const std::string& pattern() const { return pattern_; }

  /// Binds slots (percent-decoded) when `uri` is an instance of the template.
  std::optional<Params> match(std::string_view uri) const;

  /// Builds a URI, percent-encoding slot values. Missing slots expand to "".
  std::string expand(const Params& slots) const;

  std::vector<std::string> slot_names() const;

 private:
  struct Segment {
    std::string text;
    bool slot = false;
  };
  std::string pattern_;
  std::string scheme_;
  std::string host_;
  std::vector<Segment> segments_;
};

struct ParsedUri {
  std::string scheme;
  std::string host;
  std::vector<std::string> segments;
};

std::optional<ParsedUri> parse_uri(std::string_view uri);

}  // namespace edgeagent::sim
