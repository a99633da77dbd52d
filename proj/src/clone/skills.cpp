#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "edgeagent/clone/clone.hpp"
#include "edgeagent/sim/dump.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::clone {
namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words{"a",  "an", "the", "of", "in",   "on", "to", "for", "and",
                                           "or", "at", "by",  "is", "with", "my", "me", "from"};
  return words;
}

std::string line_escape(std::string_view s) { return sim::escape_dump_extra(s); }

struct Line {
  std::string key;
  std::string value;
};

std::vector<Line> read_lines(std::string_view text, const char* what) {
  std::vector<Line> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto colon = line.find(": ");
    if (colon == std::string::npos) {
      if (!line.empty() && line.back() == ':') {
        out.push_back({line.substr(0, line.size() - 1), ""});
        continue;
      }
      throw Error(Errc::ParseError, std::string(what) + ": bad line '" + line + "'");
    }
    out.push_back({line.substr(0, colon), sim::unescape_dump(line.substr(colon + 2))});
  }
  return out;
}

void write_descriptor(std::string& out, const std::string& prefix, const LaunchDescriptor& d) {
  out += prefix + ".action: " + line_escape(d.action) + "\n";
  if (d.data_uri) out += prefix + ".data_uri: " + line_escape(*d.data_uri) + "\n";
  out += prefix + ".component: " + line_escape(d.component.flat()) + "\n";
  out += prefix + ".capture_method: " + std::string(capture_method_name(d.capture_method)) + "\n";
  for (const auto& [k, v] : d.extras)
    out += prefix + ".extra: " + line_escape(line_escape(k) + "=" + line_escape(v)) + "\n";
}

bool read_descriptor(const Line& l, const std::string& prefix, LaunchDescriptor& d) {
  if (l.key.rfind(prefix + ".", 0) != 0) return false;
  std::string field = l.key.substr(prefix.size() + 1);
  if (field == "action") {
    d.action = l.value;
  } else if (field == "data_uri") {
    d.data_uri = l.value;
  } else if (field == "component") {
    auto c = sim::ComponentName::parse(l.value);
    if (!c) throw Error(Errc::ParseError, "bad component '" + l.value + "'");
    d.component = *c;
  } else if (field == "capture_method") {
    d.capture_method = l.value == "full_parse" ? CaptureMethod::full_parse : CaptureMethod::keyword_filter;
  } else if (field == "extra") {
    // The pair itself was escaped once more; find the first unescaped '='.
    size_t i = 0;
    for (; i < l.value.size(); ++i) {
      if (l.value[i] == '\\') {
        ++i;
        continue;
      }
      if (l.value[i] == '=') break;
    }
    if (i >= l.value.size()) throw Error(Errc::ParseError, "bad extra '" + l.value + "'");
    d.extras[sim::unescape_dump(l.value.substr(0, i))] = sim::unescape_dump(l.value.substr(i + 1));
  } else {
    throw Error(Errc::ParseError, "unknown field " + l.key);
  }
  return true;
}

std::int64_t to_int(const std::string& v) {
  try {
    return std::stoll(v);
  } catch (const std::exception&) {
    throw Error(Errc::ParseError, "expected integer, got '" + v + "'");
  }
}

std::string file_stem(const std::string& name) { return text::percent_encode(name); }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::StorageWriteFailure, "cannot write " + tmp.string());
    out << body;
    if (!out) throw Error(Errc::StorageWriteFailure, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p, ec);
  if (ec) throw Error(Errc::StorageWriteFailure, "cannot replace " + p.string());
}

std::string serialize_any(const Bookmark& b) { return serialize(b); }
std::string serialize_any(const SkillCard& c) { return serialize(c); }
void parse_any(std::string_view t, Bookmark& out) { out = parse_bookmark(t); }
void parse_any(std::string_view t, SkillCard& out) { out = parse_skill_card(t); }

}  // namespace

std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& t : text::tokenize(s))
    if (!stopwords().count(t) && seen.insert(t).second) out.push_back(t);
  return out;
}

PageSummarizer::Summary FixturePageSummarizer::summarize_page(const std::string& app_id, const PageSignature& sig) {
  if (fail_ || sig.top_texts.empty()) throw Error(Errc::ModelUnavailable, "page summarizer failed for " + app_id);
  const std::string& top = sig.top_texts.front();
  return {sig.activity + ": " + top, top};
}

SkillCard distill_skill(const Trajectory& traj, const LaunchDescriptor& descriptor, const PageSignature& final_sig,
                        PageSummarizer& summarizer, const std::string& trajectory_ref, std::int64_t created_at) {
  if (traj.final.app_id != descriptor.component.app_id || traj.final.activity != descriptor.component.activity)
    throw Error(Errc::FinalMismatch, traj.final.app_id + "/" + traj.final.activity + " vs " +
                                         descriptor.component.flat());
  SkillCard card;
  try {
    auto s = summarizer.summarize_page(descriptor.component.app_id, final_sig);
    card.name = s.name;
    card.description = s.description;
  } catch (const std::exception&) {
    card.name = descriptor.component.flat();
    card.description = card.name;
  }
  card.triggers = content_words(card.description);
  card.target_app = descriptor.component.app_id;
  card.entry = descriptor;
  card.trajectory_ref = trajectory_ref;
  card.created_at = created_at;
  return card;
}

sim::IntentMsg bind_skill(const SkillCard& card, const sim::Params& slots) {
  sim::IntentMsg msg = to_intent(card.entry);
  if (msg.data_uri && msg.data_uri->find('{') != std::string::npos) {
    try {
      msg.data_uri = sim::UriTemplate(*msg.data_uri).expand(slots);
    } catch (const Error&) {
      msg.data_uri = text::substitute(*msg.data_uri, [&](std::string_view k) -> std::optional<std::string> {
        auto it = slots.find(std::string(k));
        if (it == slots.end()) return std::nullopt;
        return text::percent_encode(it->second);
      });
    }
  }
  for (auto& [k, v] : msg.extras)
    v = text::substitute(v, [&](std::string_view key) -> std::optional<std::string> {
      auto it = slots.find(std::string(key));
      if (it == slots.end()) return std::nullopt;
      return it->second;
    });
  return msg;
}

std::string serialize(const Bookmark& b) {
  std::string out;
  out += "name: " + line_escape(b.name) + "\n";
  out += "created_at: " + std::to_string(b.created_at) + "\n";
  out += "summary: " + line_escape(b.summary) + "\n";
  write_descriptor(out, "descriptor", b.descriptor);
  out += "signature.activity: " + line_escape(b.signature.activity) + "\n";
  for (const auto& t : b.signature.top_texts) out += "signature.top_text: " + line_escape(t) + "\n";
  out += "signature.digest: " + b.signature.digest + "\n";
  return out;
}

Bookmark parse_bookmark(std::string_view text) {
  Bookmark b;
  for (const auto& l : read_lines(text, "bookmark")) {
    if (l.key == "name") {
      b.name = l.value;
    } else if (l.key == "created_at") {
      b.created_at = to_int(l.value);
    } else if (l.key == "summary") {
      b.summary = l.value;
    } else if (l.key == "signature.activity") {
      b.signature.activity = l.value;
    } else if (l.key == "signature.top_text") {
      b.signature.top_texts.push_back(l.value);
    } else if (l.key == "signature.digest") {
      b.signature.digest = l.value;
    } else if (!read_descriptor(l, "descriptor", b.descriptor)) {
      throw Error(Errc::ParseError, "bookmark: unknown field " + l.key);
    }
  }
  if (b.name.empty()) throw Error(Errc::ParseError, "bookmark: missing name");
  return b;
}

std::string serialize(const SkillCard& c) {
  std::string out;
  out += "name: " + line_escape(c.name) + "\n";
  out += "description: " + line_escape(c.description) + "\n";
  out += "target_app: " + line_escape(c.target_app) + "\n";
  for (const auto& t : c.triggers) out += "trigger: " + line_escape(t) + "\n";
  for (const auto& p : c.parameters) out += "parameter: " + line_escape(p) + "\n";
  out += "trajectory_ref: " + line_escape(c.trajectory_ref) + "\n";
  out += "created_at: " + std::to_string(c.created_at) + "\n";
  write_descriptor(out, "entry", c.entry);
  return out;
}

SkillCard parse_skill_card(std::string_view text) {
  SkillCard c;
  for (const auto& l : read_lines(text, "skill card")) {
    if (l.key == "name") {
      c.name = l.value;
    } else if (l.key == "description") {
      c.description = l.value;
    } else if (l.key == "target_app") {
      c.target_app = l.value;
    } else if (l.key == "trigger") {
      c.triggers.push_back(l.value);
    } else if (l.key == "parameter") {
      c.parameters.push_back(l.value);
    } else if (l.key == "trajectory_ref") {
      c.trajectory_ref = l.value;
    } else if (l.key == "created_at") {
      c.created_at = to_int(l.value);
    } else if (!read_descriptor(l, "entry", c.entry)) {
      throw Error(Errc::ParseError, "skill card: unknown field " + l.key);
    }
  }
  if (c.name.empty()) throw Error(Errc::ParseError, "skill card: missing name");
  return c;
}

template <typename T>
FileStore<T>::FileStore(std::filesystem::path dir, std::string extension)
    : dir_(std::move(dir)), ext_(std::move(extension)) {
  std::error_code ec;
  if (!std::filesystem::is_directory(*dir_, ec)) return;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(*dir_, ec))
    if (e.is_regular_file() && e.path().extension() == ext_) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    T value;
    parse_any(read_file(f), value);
    items_[value.name] = std::move(value);
  }
}

template <typename T>
void FileStore<T>::put(const T& value) {
  if (value.name.empty()) throw Error(Errc::InvalidArgument, "record name must be non-empty");
  std::unique_lock lock(mu_);
  if (dir_) write_file(*dir_ / (file_stem(value.name) + ext_), serialize_any(value));
  items_[value.name] = value;
}

template <typename T>
std::optional<T> FileStore<T>::get(const std::string& name) const {
  std::shared_lock lock(mu_);
  auto it = items_.find(name);
  if (it == items_.end()) return std::nullopt;
  return it->second;
}

template <typename T>
std::vector<T> FileStore<T>::list() const {
  std::shared_lock lock(mu_);
  std::vector<T> out;
  for (const auto& [_, v] : items_) out.push_back(v);
  return out;
}

template <typename T>
bool FileStore<T>::contains(const std::string& name) const {
  std::shared_lock lock(mu_);
  return items_.count(name) > 0;
}

template <typename T>
size_t FileStore<T>::size() const {
  std::shared_lock lock(mu_);
  return items_.size();
}

template class FileStore<Bookmark>;
template class FileStore<SkillCard>;

std::string TraceStore::put(const Trajectory& t) {
  std::unique_lock lock(mu_);
  if (dir_ && traces_.empty()) {
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(*dir_, ec))
      if (e.path().extension() == ".json")
        traces_[e.path().stem().string()] = trajectory_from_json(nlohmann::json::parse(read_file(e.path())));
  }
  std::string id;
  for (size_t n = traces_.size() + 1;; ++n) {
    id = "trace-" + std::to_string(n);
    if (!traces_.count(id)) break;
  }
  if (dir_) write_file(*dir_ / (id + ".json"), to_json(t).dump(2) + "\n");
  traces_[id] = t;
  return id;
}

std::optional<Trajectory> TraceStore::get(const std::string& id) const {
  std::shared_lock lock(mu_);
  if (auto it = traces_.find(id); it != traces_.end()) return it->second;
  if (!dir_) return std::nullopt;
  auto p = *dir_ / (id + ".json");
  if (!std::filesystem::exists(p)) return std::nullopt;
  return trajectory_from_json(nlohmann::json::parse(read_file(p)));
}

size_t TraceStore::size() const {
  std::shared_lock lock(mu_);
  return traces_.size();
}

}  // namespace edgeagent::clone
