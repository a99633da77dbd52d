#include "edgeagent/memory/gallery.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "edgeagent/error.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::memory {
namespace {

constexpr std::string_view kHeader = "# gallery-memory v1";

std::string one_line(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c == '\n' || c == '\r') c = ' ';
  return text::trim(out);
}

std::string field(std::string_view key, std::string_view value) {
  std::string line = "- ";
  line += key;
  line += ':';
  if (!value.empty()) {
    line += ' ';
    line += value;
  }
  return line + "\n";
}

}  // namespace

std::string serialize(const MemoryFile& file) {
  std::string out(kHeader);
  out += "\ncursor: " + std::to_string(file.cursor) + "\n";
  for (const auto& e : file.entries) {
    out += "\n## " + one_line(e.filename) + "\n";
    out += field("captured_at", std::to_string(e.captured_at));
    out += field("kind", e.kind == SummaryKind::model ? "model" : "metadata_fallback");
    std::vector<std::string> objs;
    for (const auto& o : e.objects) {
      std::string clean = one_line(o);
      std::replace(clean.begin(), clean.end(), ',', ' ');
      objs.push_back(clean);
    }
    out += field("objects", text::join(objs, ", "));
    out += field("scene", one_line(e.scene));
    out += field("event", one_line(e.event));
    out += field("text", one_line(e.free_text));
  }
  return out;
}

MemoryFile parse_memory_file(std::string_view raw) {
  MemoryFile file;
  std::istringstream in{std::string(raw)};
  std::string line;
  bool header = false;
  MemoryEntry* cur = nullptr;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    if (!header) {
      if (line != kHeader) throw Error(Errc::ParseError, "memory file: missing header");
      header = true;
      continue;
    }
    if (line.rfind("cursor:", 0) == 0) {
      try {
        file.cursor = std::stoll(text::trim(line.substr(7)));
      } catch (const std::exception&) {
        throw Error(Errc::ParseError, "memory file: bad cursor on line " + std::to_string(lineno));
      }
    } else if (line.rfind("## ", 0) == 0) {
      file.entries.emplace_back();
      cur = &file.entries.back();
      cur->filename = line.substr(3);
    } else if (line.rfind("- ", 0) == 0 && cur) {
      auto colon = line.find(':');
      if (colon == std::string::npos) throw Error(Errc::ParseError, "memory file: line " + std::to_string(lineno));
      std::string key = line.substr(2, colon - 2);
      std::string value = text::trim(line.substr(colon + 1));
      if (key == "captured_at") {
        cur->captured_at = std::stoll(value);
      } else if (key == "kind") {
        cur->kind = value == "metadata_fallback" ? SummaryKind::metadata_fallback : SummaryKind::model;
      } else if (key == "objects") {
        cur->objects.clear();
        if (!value.empty())
          for (auto& o : text::split(value, ',')) cur->objects.push_back(text::trim(o));
      } else if (key == "scene") {
        cur->scene = value;
      } else if (key == "event") {
        cur->event = value;
      } else if (key == "text") {
        cur->free_text = value;
      }
    } else {
      throw Error(Errc::ParseError, "memory file: unexpected line " + std::to_string(lineno));
    }
  }
  return file;
}

MemoryStore::MemoryStore(std::filesystem::path path) : path_(std::move(path)) {}

std::string MemoryStore::raw() const {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MemoryFile MemoryStore::load() const {
  if (!std::filesystem::exists(path_)) return {};
  return parse_memory_file(raw());
}

void MemoryStore::save(const MemoryFile& file) const {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  auto tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::StorageWriteFailure, "cannot open " + tmp.string());
    out << serialize(file);
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw Error(Errc::StorageWriteFailure, "short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path_, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::StorageWriteFailure, "cannot replace " + path_.string());
  }
}

FixtureSummarizer::FixtureSummarizer(std::vector<std::int64_t> failing_ids, bool fail_all)
    : failing_(std::move(failing_ids)), fail_all_(fail_all) {}

MediaSummary FixtureSummarizer::summarize(const sim::MediaAsset& asset) {
  ++calls_;
  if (fail_all_ || std::find(failing_.begin(), failing_.end(), asset.asset_id) != failing_.end())
    throw Error(Errc::ModelUnavailable, "summarizer failed on asset " + std::to_string(asset.asset_id));
  MediaSummary s;
  s.objects = asset.truth.objects;
  s.scene = asset.truth.scene;
  s.event = asset.truth.event;
  std::string desc = text::join(asset.truth.objects, ", ");
  if (!s.scene.empty()) desc += (desc.empty() ? "" : " ") + std::string("at ") + s.scene;
  if (!s.event.empty()) desc += (desc.empty() ? "" : " ") + std::string("during ") + s.event;
  s.free_text = desc;
  return s;
}

MemoryEntry metadata_entry(const sim::MediaAsset& asset) {
  MemoryEntry e;
  e.filename = asset.filename;
  e.captured_at = asset.captured_at;
  e.kind = SummaryKind::metadata_fallback;
  e.free_text = "file " + asset.filename + " folder " + asset.folder + " captured " +
                std::to_string(asset.captured_at) + " size " + std::to_string(asset.width) + "x" +
                std::to_string(asset.height);
  return e;
}

std::vector<std::string> profile_tags(const MemoryEntry& e) {
  std::vector<std::string> tags;
  for (const auto& o : e.objects)
    if (!o.empty()) tags.push_back(text::to_lower(o));
  if (!e.scene.empty()) tags.push_back(text::to_lower(e.scene));
  if (!e.event.empty()) tags.push_back(text::to_lower(e.event));
  return tags;
}

SyncResult memory_sync(const sim::Device& media, Summarizer& summarizer, const RedactionPolicy& policy,
                       const MemoryStore& store, const UserProfile& profile) {
  SyncResult result{{}, profile};
  if (!profile.enabled) return result;
  const Redactor redactor(policy);
  MemoryFile file = store.load();
  auto fresh = media.media_list(file.cursor);
  if (fresh.empty()) return result;

  for (const auto& asset : fresh) {
    MemoryEntry e;
    try {
      MediaSummary s = summarizer.summarize(asset);
      e.filename = asset.filename;
      e.captured_at = asset.captured_at;
      e.kind = SummaryKind::model;
      e.objects = s.objects;
      e.scene = s.scene;
      e.event = s.event;
      e.free_text = s.free_text;
    } catch (const std::exception&) {
      e = metadata_entry(asset);
    }
    e.filename = redactor.apply(e.filename);
    for (auto& o : e.objects) o = redactor.apply(o);
    e.scene = redactor.apply(e.scene);
    e.event = redactor.apply(e.event);
    e.free_text = redactor.apply(e.free_text);

    auto same = std::find_if(file.entries.begin(), file.entries.end(),
                             [&](const MemoryEntry& x) { return x.filename == e.filename; });
    if (same != file.entries.end()) {
      *same = e;
    } else {
      file.entries.push_back(e);
    }
    for (const auto& tag : profile_tags(e)) ++result.profile.tag_weights[tag];
    file.cursor = std::max(file.cursor, asset.asset_id);
    result.appended.push_back(std::move(e));
  }
  store.save(file);
  return result;
}

namespace {

std::set<std::string> entry_tokens(const MemoryEntry& e) {
  std::set<std::string> toks;
  auto add = [&](std::string_view s) {
    for (auto& t : text::tokenize(s)) toks.insert(std::move(t));
  };
  for (const auto& o : e.objects) add(o);
  add(e.scene);
  add(e.event);
  add(e.free_text);
  return toks;
}

}  // namespace

std::vector<QueryHit> memory_query(std::string_view query, const MemoryFile& file) {
  auto qt = text::tokenize(query);
  std::set<std::string> q(qt.begin(), qt.end());
  struct Scored {
    QueryHit hit;
    VirtualMs captured_at;
  };
  std::vector<Scored> scored;
  for (const auto& e : file.entries) {
    auto toks = entry_tokens(e);
    int score = 0;
    for (const auto& t : q) score += static_cast<int>(toks.count(t));
    if (score >= 1) scored.push_back({{e.filename, score}, e.captured_at});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.hit.score != b.hit.score) return a.hit.score > b.hit.score;
    if (a.captured_at != b.captured_at) return a.captured_at > b.captured_at;
    return a.hit.filename < b.hit.filename;
  });
  std::vector<QueryHit> out;
  for (auto& s : scored) out.push_back(std::move(s.hit));
  return out;
}

StagingResult stage(const std::vector<std::string>& filenames, sim::Device& media, const std::string& task_id) {
  if (task_id.empty()) throw Error(Errc::InvalidArgument, "task_id must be non-empty");
  StagingResult r;
  r.path = "staging/" + task_id + "/";
  for (const auto& f : filenames)
    if (media.find_media(f) && std::find(r.staged.begin(), r.staged.end(), f) == r.staged.end())
      r.staged.push_back(f);
  if (r.staged.empty()) throw Error(Errc::EmptyAfterReconcile, "no staged asset survived reconciliation");
  media.write_folder(r.path, r.staged);
  return r;
}

}  // namespace edgeagent::memory
