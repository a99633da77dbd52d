#include "edgeagent/sim/dump.hpp"

namespace edgeagent::sim {
namespace {

std::string escape_with(std::string_view s, std::string_view specials) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
    } else if (c == '\\' || specials.find(c) != std::string_view::npos) {
      out += '\\';
      out += c;
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string escape_dump_token(std::string_view s) {
  if (s == "-") return "\\-";
  return escape_with(s, " {}");
}

std::string escape_dump_extra(std::string_view s) { return escape_with(s, ",={}"); }

std::string unescape_dump(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      out += s[i] == 'n' ? '\n' : s[i];
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace edgeagent::sim
