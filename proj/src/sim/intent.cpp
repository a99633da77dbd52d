#include "edgeagent/sim/intent.hpp"

#include "edgeagent/error.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::sim {

using nlohmann::json;

std::optional<ComponentName> ComponentName::parse(std::string_view flat) {
  auto slash = flat.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == flat.size()) return std::nullopt;
  return ComponentName{std::string(flat.substr(0, slash)), std::string(flat.substr(slash + 1))};
}

json to_json(const IntentMsg& i) {
  json j = {{"action", i.action}, {"extras", i.extras}};
  j["data_uri"] = i.data_uri ? json(*i.data_uri) : json(nullptr);
  j["component"] = i.component ? json(i.component->flat()) : json(nullptr);
  return j;
}

IntentMsg intent_from_json(const json& j) {
  IntentMsg i;
  i.action = j.value("action", std::string(kActionView));
  if (j.contains("data_uri") && !j["data_uri"].is_null()) i.data_uri = j["data_uri"].get<std::string>();
  if (j.contains("component") && !j["component"].is_null()) {
    auto c = ComponentName::parse(j["component"].get<std::string>());
    if (!c) throw Error(Errc::ParseError, "component must be app/activity");
    i.component = *c;
  }
  if (j.contains("extras")) i.extras = j["extras"].get<std::map<std::string, std::string>>();
  return i;
}

std::optional<ParsedUri> parse_uri(std::string_view uri) {
  auto sep = uri.find("://");
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;
  ParsedUri out;
  out.scheme = std::string(uri.substr(0, sep));
  auto rest = uri.substr(sep + 3);
  auto slash = rest.find('/');
  out.host = std::string(rest.substr(0, slash));
  if (out.host.empty()) return std::nullopt;
  if (slash != std::string_view::npos) {
    auto path = rest.substr(slash + 1);
    if (!path.empty()) out.segments = text::split(path, '/');
  }
  return out;
}

UriTemplate::UriTemplate(std::string_view pattern) : pattern_(pattern) {
  auto parsed = parse_uri(pattern);
  if (!parsed) throw Error(Errc::InvalidArgument, "malformed deeplink pattern: " + pattern_);
  scheme_ = parsed->scheme;
  host_ = parsed->host;
  for (const auto& seg : parsed->segments) {
    if (seg.empty()) throw Error(Errc::InvalidArgument, "empty path segment in " + pattern_);
    bool open = seg.find('{') != std::string::npos;
    bool close = seg.find('}') != std::string::npos;
    if (open || close) {
      if (seg.size() < 3 || seg.front() != '{' || seg.back() != '}' ||
          seg.find_first_of("{}", 1) != seg.size() - 1)
        throw Error(Errc::InvalidArgument, "placeholder must span a whole segment: " + pattern_);
      segments_.push_back({seg.substr(1, seg.size() - 2), true});
    } else {
      segments_.push_back({seg, false});
    }
  }
}

std::optional<Params> UriTemplate::match(std::string_view uri) const {
  auto parsed = parse_uri(uri);
  if (!parsed || parsed->scheme != scheme_ || parsed->host != host_ ||
      parsed->segments.size() != segments_.size())
    return std::nullopt;
  Params slots;
  for (size_t i = 0; i < segments_.size(); ++i) {
    const auto& want = segments_[i];
    const auto& got = parsed->segments[i];
    if (want.slot) {
      if (got.empty()) return std::nullopt;
      slots[want.text] = text::percent_decode(got);
    } else if (want.text != got) {
      return std::nullopt;
    }
  }
  return slots;
}

std::string UriTemplate::expand(const Params& slots) const {
  std::string out = scheme_ + "://" + host_;
  for (const auto& seg : segments_) {
    out += '/';
    if (seg.slot) {
      auto it = slots.find(seg.text);
      out += it == slots.end() ? std::string() : text::percent_encode(it->second);
    } else {
      out += seg.text;
    }
  }
  return out;
}

std::vector<std::string> UriTemplate::slot_names() const {
  std::vector<std::string> out;
  for (const auto& seg : segments_)
    if (seg.slot) out.push_back(seg.text);
  return out;
}

}  // namespace edgeagent::sim
