#include <algorithm>
#include <cctype>

#include "edgeagent/clone/clone.hpp"
#include "edgeagent/sim/dump.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::clone {
namespace {

// Reads an escaped run up to (not including) the first unescaped stop char.
std::optional<std::string> read_until(std::string_view s, size_t& i, std::string_view stops) {
  size_t start = i;
  while (i < s.size()) {
    if (s[i] == '\\') {
      if (i + 1 >= s.size()) return std::nullopt;
      i += 2;
      continue;
    }
    if (stops.find(s[i]) != std::string_view::npos) break;
    ++i;
  }
  return std::string(s.substr(start, i - start));
}

bool expect(std::string_view s, size_t& i, std::string_view lit) {
  if (s.substr(i, lit.size()) != lit) return false;
  i += lit.size();
  return true;
}

std::optional<std::string> optional_token(const std::string& raw) {
  if (raw == "-") return std::nullopt;
  return sim::unescape_dump(raw);
}

std::string_view strip_leading(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

std::optional<sim::IntentMsg> parse_intent_line(std::string_view line) {
  std::string_view s = strip_leading(line);
  size_t i = 0;
  sim::IntentMsg msg;
  if (!expect(s, i, "intent={act=")) return std::nullopt;
  auto act = read_until(s, i, " ");
  if (!act || act->empty() || *act == "-") return std::nullopt;
  msg.action = sim::unescape_dump(*act);
  if (!expect(s, i, " dat=")) return std::nullopt;
  auto dat = read_until(s, i, " ");
  if (!dat || dat->empty()) return std::nullopt;
  msg.data_uri = optional_token(*dat);
  if (!expect(s, i, " cmp=")) return std::nullopt;
  auto cmp = read_until(s, i, " ");
  if (!cmp || cmp->empty()) return std::nullopt;
  if (auto flat = optional_token(*cmp)) {
    msg.component = sim::ComponentName::parse(*flat);
    if (!msg.component) return std::nullopt;
  }
  if (!expect(s, i, " extras={")) return std::nullopt;
  while (i < s.size() && s[i] != '}') {
    auto key = read_until(s, i, ",={}");
    if (!key || !expect(s, i, "=")) return std::nullopt;
    auto val = read_until(s, i, ",={}");
    if (!val) return std::nullopt;
    msg.extras[sim::unescape_dump(*key)] = sim::unescape_dump(*val);
    if (i < s.size() && s[i] == ',') ++i;
  }
  if (!expect(s, i, "}}")) return std::nullopt;
  if (i != s.size()) return std::nullopt;
  return msg;
}

DumpParse parse_dump(std::string_view text) {
  DumpParse out;
  std::optional<int> task_id;
  std::string task_app;
  size_t block = 0;
  struct Pending {
    std::string app;
    std::string activity;
    size_t line;
  };
  std::optional<Pending> pending;

  size_t lineno = 0;
  size_t pos = 0;
  auto warn = [&](const std::string& msg) { out.warnings.push_back("line " + std::to_string(lineno) + ": " + msg); };
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view body = strip_leading(line);
    if (body.empty()) {
      if (nl == text.size()) break;
      continue;
    }

    if (line.substr(0, 5) == "TASK ") {
      if (pending) warn("ACTIVITY without intent line");
      pending.reset();
      ++block;
      std::string rest(line.substr(5));
      auto sp = rest.find(' ');
      task_app = rest.substr(0, sp);
      task_id.reset();
      std::string id = sp == std::string::npos ? "" : rest.substr(sp + 1);
      if (id.size() > 3 && id.rfind("id=", 0) == 0 &&
          std::all_of(id.begin() + 3, id.end(), [](unsigned char c) { return std::isdigit(c); }) &&
          id.size() <= 12) {
        task_id = std::stoi(id.substr(3));
      } else {
        warn("unreadable TASK line");
      }
    } else if (body.substr(0, 9) == "ACTIVITY ") {
      if (pending) warn("ACTIVITY without intent line");
      pending.reset();
      auto comp = sim::ComponentName::parse(body.substr(9));
      if (!comp || comp->app_id.empty() || comp->activity.empty() ||
          comp->activity.find(' ') != std::string::npos) {
        warn("unreadable ACTIVITY line");
      } else {
        pending = Pending{comp->app_id, comp->activity, lineno};
      }
    } else if (body.substr(0, 7) == "intent=") {
      if (!pending) {
        warn("intent line without ACTIVITY");
      } else if (auto msg = parse_intent_line(body)) {
        out.records.push_back({task_id, task_app, pending->app, pending->activity, *msg, block});
      } else {
        warn("malformed intent line");
      }
      pending.reset();
    } else {
      warn("unrecognized line");
    }
    if (nl == text.size()) break;
  }
  if (pending) out.warnings.push_back("ACTIVITY without intent line at end");
  return out;
}

}  // namespace edgeagent::clone
