#include "edgeagent/perception/intent.hpp"

#include <regex>
#include <set>

#include "edgeagent/error.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::perception {
namespace {

const auto kIcase = std::regex::icase | std::regex::ECMAScript;

// A deictic word, optionally swallowing a generic head noun ("this product").
const std::regex& deixis_re() {
  static const std::regex re(
      R"(\b(this|these|it)\b(\s+(product|products|item|items|thing|things|object|objects|one|ones|stuff))?)",
      kIcase);
  return re;
}

std::string strip_trailing_punct(std::string s) {
  s = text::trim(s);
  while (!s.empty() && (s.back() == '?' || s.back() == '.' || s.back() == '!')) s.pop_back();
  return text::trim(s);
}

std::optional<std::string> direct_answer(std::string_view query, const SceneDescriptor& d) {
  auto toks = text::tokenize(query);
  std::set<std::string> words(toks.begin(), toks.end());
  auto has = [&](std::initializer_list<const char*> ws) {
    for (const char* w : ws)
      if (words.count(w)) return true;
    return false;
  };
  if (!has({"what", "which", "where", "who"})) return std::nullopt;
  if (has({"object", "thing", "animal", "item"}) && !d.objects.empty()) return d.objects.front();
  if (has({"scene", "place", "where"}) && !d.scene.empty()) return d.scene;
  if (has({"event", "happening", "occasion"}) && !d.event.empty()) return d.event;
  return std::nullopt;
}

struct AliasHit {
  size_t pos = std::string::npos;
  size_t len = 0;
  std::string app_id;
};

AliasHit find_alias(const std::string& query, const AppRegistry& registry) {
  AliasHit best;
  for (const auto& a : registry.aliases) {
    if (a.alias.empty()) continue;
    std::string pattern;
    for (char c : a.alias) {
      if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) pattern += '\\';
      pattern += c;
    }
    std::smatch m;
    if (std::regex_search(query, m, std::regex("\\b" + pattern + "\\b", kIcase))) {
      auto pos = static_cast<size_t>(m.position(0));
      if (pos < best.pos || (pos == best.pos && a.alias.size() > best.len))
        best = {pos, a.alias.size(), a.app_id};
    }
  }
  return best;
}

}  // namespace

void FixtureSceneResolver::add_screen(std::string screenshot_id, SceneDescriptor d) {
  screens_[std::move(screenshot_id)] = std::move(d);
}

std::optional<SceneDescriptor> FixtureSceneResolver::describe(const Frame& frame) {
  if (const auto* d = std::get_if<SceneDescriptor>(&frame.scene)) return *d;
  auto it = screens_.find(std::get<std::string>(frame.scene));
  if (it == screens_.end()) return std::nullopt;
  return it->second;
}

std::string expand_query(std::string_view query) {
  const std::string q(query);
  static const std::regex how_much(
      R"(^\s*how much (?:does|do|is|are|would) (.+?)(?: cost| costs| sell for)?(?: on (.+?))?\s*[?.!]*\s*$)",
      kIcase);
  static const std::regex price_of(
      R"(^\s*(?:please\s+)?(?:check|find|get|tell me|show me|what is|what's)\s+(?:the\s+)?price of (.+?)(?: on (.+?))?\s*[?.!]*\s*$)",
      kIcase);
  std::smatch m;
  if (std::regex_match(q, m, how_much) || std::regex_match(q, m, price_of)) {
    std::string out = "the user wants to know the price of " + text::trim(m[1].str());
    if (m[2].matched) out += " on " + text::trim(m[2].str());
    return out;
  }
  return strip_trailing_punct(q);
}

bool mentions_deixis(std::string_view text) {
  const std::string s(text);
  return std::regex_search(s, deixis_re());
}

Understanding understand(const AlignedUtterance& a, SceneResolver& resolver) {
  auto descriptor = resolver.describe(a.representative);
  if (descriptor) {
    if (auto answer = direct_answer(a.text, *descriptor)) return DirectAnswer{*answer};
  }

  std::smatch m;
  const bool deictic = std::regex_search(a.text, m, deixis_re());
  std::string resolved = a.text;
  if (deictic) {
    if (!descriptor || descriptor->objects.empty())
      throw Error(Errc::UnresolvedDeixis, "nothing salient in frame " +
                                              std::to_string(a.representative.frame_id) + " for: " + a.text);
    resolved = std::regex_replace(a.text, deixis_re(), descriptor->objects.front());
  }
  return ExpandedQuery{expand_query(resolved)};
}

const char* action_name(ActionType a) {
  switch (a) {
    case ActionType::search: return "search";
    case ActionType::open: return "open";
    case ActionType::execute_skill: return "execute_skill";
    case ActionType::compose: return "compose";
    case ActionType::answer: return "answer";
  }
  return "answer";
}

std::optional<ActionType> parse_action(std::string_view s) {
  for (auto a : {ActionType::search, ActionType::open, ActionType::execute_skill, ActionType::compose,
                 ActionType::answer})
    if (s == action_name(a)) return a;
  return std::nullopt;
}

StructuredIntent decompose(std::string_view expanded_query, const AppRegistry& registry) {
  static const std::regex compose_noun(R"(\b(album|video|montage|collage|slideshow)\b)", kIcase);
  static const std::regex compose_verb(R"(\b(generate|make|create|compose|build)\b)", kIcase);
  static const std::regex themed(R"(\b([\w]+)-themed\b)", kIcase);
  static const std::regex photos_of(R"(\bphotos? of (?:my |the )?([\w]+))", kIcase);
  static const std::regex x_photos(R"(\b(?:all |my |the )?([\w]+) (?:photos|pictures|pics)\b)", kIcase);
  static const std::regex price_of(R"(price of (.+?)(?: on (.+?))?\s*[?.!]*$)", kIcase);
  static const std::regex search_for(
      R"(^\s*(?:please\s+)?(?:search|look up|look for|find|shop for|buy)\s+(?:for\s+)?(.+?)(?: on (.+?))?\s*[?.!]*$)",
      kIcase);
  static const std::regex open_re(R"(^\s*(?:please\s+)?open\s+(.+?)\s*[?.!]*$)", kIcase);
  static const std::regex goto_re(
      R"(^\s*(?:please\s+)?(?:go to|jump to|take me to|return to|bring me to|navigate to)\s+(.+?)\s*[?.!]*$)",
      kIcase);

  StructuredIntent out;
  out.expanded_query = std::string(expanded_query);
  out.origin = IntentOrigin::rule_stub;
  const std::string& q = out.expanded_query;
  std::smatch m;
  bool matched = true;

  if (std::regex_search(q, compose_noun) && std::regex_search(q, compose_verb)) {
    out.action_type = ActionType::compose;
    if (std::regex_search(q, m, themed) || std::regex_search(q, m, photos_of) || std::regex_search(q, m, x_photos))
      out.slots["theme"] = text::to_lower(m[1].str());
  } else if (std::regex_search(q, m, price_of) || std::regex_match(q, m, search_for)) {
    out.action_type = ActionType::search;
    out.slots["q"] = text::trim(m[1].str());
  } else if (std::regex_match(q, m, goto_re)) {
    out.action_type = ActionType::execute_skill;
    out.slots["goal"] = text::trim(m[1].str());
  } else if (std::regex_match(q, m, open_re)) {
    out.action_type = ActionType::open;
    out.slots["target"] = text::trim(m[1].str());
  } else {
    matched = false;
  }

  if (!matched) {
    out.action_type = ActionType::answer;
    return out;
  }

  auto alias = find_alias(q, registry);
  if (!alias.app_id.empty()) {
    out.target_app = alias.app_id;
  } else if (auto d = registry.defaults.find(out.action_type); d != registry.defaults.end()) {
    out.target_app = d->second;
  }
  if (out.target_app.empty()) {
    out.action_type = ActionType::answer;
    out.slots.clear();
  }
  return out;
}

}  // namespace edgeagent::perception
