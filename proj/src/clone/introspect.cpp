#include "edgeagent/clone/clone.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::clone {

const char* capture_method_name(CaptureMethod m) {
  return m == CaptureMethod::keyword_filter ? "keyword_filter" : "full_parse";
}

bool same_launch(const LaunchDescriptor& a, const LaunchDescriptor& b) {
  return a.action == b.action && a.data_uri == b.data_uri && a.component == b.component && a.extras == b.extras;
}

sim::IntentMsg to_intent(const LaunchDescriptor& d) {
  sim::IntentMsg m;
  m.action = d.action;
  m.data_uri = d.data_uri;
  m.component = d.component;
  m.extras = d.extras;
  return m;
}

namespace {

LaunchDescriptor from_record(const sim::IntentMsg& msg, const std::string& app_id, const std::string& activity,
                             CaptureMethod method) {
  LaunchDescriptor d;
  d.action = msg.action;
  d.data_uri = msg.data_uri;
  d.component = {app_id, activity};
  d.extras = msg.extras;
  d.capture_method = method;
  return d;
}

}  // namespace

std::optional<LaunchDescriptor> keyword_filter_entry(const std::string& app_id, std::string_view dump) {
  // Keep only the lines of the block whose TASK line names the app.
  std::vector<std::string_view> block;
  bool inside = false;
  size_t pos = 0;
  while (pos < dump.size()) {
    size_t nl = dump.find('\n', pos);
    if (nl == std::string_view::npos) nl = dump.size();
    std::string_view line = dump.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.substr(0, 5) == "TASK ") {
      if (inside) break;
      auto rest = line.substr(5);
      inside = rest.substr(0, rest.find(' ')) == app_id;
      continue;
    }
    if (inside) block.push_back(line);
  }
  if (block.empty()) return std::nullopt;

  // The top of the stack is the last ACTIVITY line.
  for (size_t i = block.size(); i-- > 0;) {
    std::string_view body = block[i];
    while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
    if (body.substr(0, 9) != "ACTIVITY ") continue;
    auto comp = sim::ComponentName::parse(body.substr(9));
    if (!comp || comp->app_id != app_id || comp->activity.find(' ') != std::string::npos ||
        i + 1 >= block.size())
      return std::nullopt;
    auto msg = parse_intent_line(block[i + 1]);
    if (!msg) return std::nullopt;
    return from_record(*msg, comp->app_id, comp->activity, CaptureMethod::keyword_filter);
  }
  return std::nullopt;
}

std::optional<LaunchDescriptor> full_parse_entry(const std::string& app_id, std::string_view dump) {
  auto parsed = parse_dump(dump);
  std::optional<size_t> owned;
  for (const auto& r : parsed.records)
    if (r.task_app == app_id && r.app_id == app_id && (!owned || r.block == *owned)) owned = r.block;
  for (auto it = parsed.records.rbegin(); it != parsed.records.rend(); ++it)
    if (owned && it->block == *owned && it->app_id == app_id)
      return from_record(it->intent, it->app_id, it->activity, CaptureMethod::full_parse);
  for (auto it = parsed.records.rbegin(); it != parsed.records.rend(); ++it)
    if (it->app_id == app_id) return from_record(it->intent, it->app_id, it->activity, CaptureMethod::full_parse);
  return std::nullopt;
}

LaunchDescriptor introspect_entry(const std::string& app_id, const DumpProvider& dump) {
  const std::string text = dump();
  if (auto d = keyword_filter_entry(app_id, text)) return *d;
  if (auto d = full_parse_entry(app_id, text)) return *d;
  throw Error(Errc::AppNotRunning, app_id);
}

}  // namespace edgeagent::clone
