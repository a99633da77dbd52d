#include "edgeagent/memory/working.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "edgeagent/error.hpp"

namespace edgeagent::memory {

nlohmann::json to_json(const WorkingMemory& wm) {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& t : wm.turns) turns.push_back({{"role", t.role}, {"text", t.text}});
  return {{"session_id", wm.session_id},
          {"goal", wm.goal},
          {"step_index", wm.step_index},
          {"turns", turns},
          {"screenshot_refs", wm.screenshot_refs},
          {"compressed_observations", wm.compressed_observations},
          {"last_action_result", wm.last_action_result},
          {"artifacts", wm.artifacts}};
}

WorkingMemory working_memory_from_json(const nlohmann::json& j) {
  try {
    WorkingMemory wm;
    wm.session_id = j.at("session_id").get<std::string>();
    wm.goal = j.value("goal", "");
    wm.step_index = j.value("step_index", 0);
    for (const auto& t : j.value("turns", nlohmann::json::array()))
      wm.turns.push_back({t.at("role").get<std::string>(), t.at("text").get<std::string>()});
    wm.screenshot_refs = j.value("screenshot_refs", std::vector<std::string>{});
    wm.compressed_observations = j.value("compressed_observations", std::vector<std::string>{});
    wm.last_action_result = j.value("last_action_result", "");
    wm.artifacts = j.value("artifacts", std::vector<std::string>{});
    return wm;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("working memory: ") + e.what());
  }
}

WorkingMemoryStore::WorkingMemoryStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

void WorkingMemoryStore::persist(const WorkingMemory& wm) {
  std::lock_guard lock(mu_);
  sessions_[wm.session_id] = wm;
  if (!dir_) return;
  auto d = *dir_ / wm.session_id;
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  auto tmp = d / "working.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::StorageWriteFailure, "cannot write " + tmp.string());
    out << to_json(wm).dump(2) << "\n";
  }
  std::filesystem::rename(tmp, d / "working.json", ec);
  if (ec) throw Error(Errc::StorageWriteFailure, "cannot replace working memory for " + wm.session_id);
}

std::optional<WorkingMemory> WorkingMemoryStore::load(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  if (auto it = sessions_.find(session_id); it != sessions_.end()) return it->second;
  if (!dir_) return std::nullopt;
  std::ifstream in(*dir_ / session_id / "working.json");
  if (!in) return std::nullopt;
  try {
    return working_memory_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("working memory: ") + e.what());
  }
}

WorkingMemory update_working(WorkingMemory wm, const WorkingEvent& event, const WorkingMemoryStore& store) {
  std::visit(
      [&](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, ObservationNote>) {
          wm.compressed_observations.push_back(ev.text);
        } else if constexpr (std::is_same_v<T, ScreenshotRef>) {
          wm.screenshot_refs.push_back(ev.screenshot_id);
        } else if constexpr (std::is_same_v<T, ActionResult>) {
          wm.last_action_result = ev.text;
          ++wm.step_index;
        } else if constexpr (std::is_same_v<T, GoalSet>) {
          wm.goal = ev.goal;
        } else if constexpr (std::is_same_v<T, TurnAdded>) {
          wm.turns.push_back(ev.turn);
        } else if constexpr (std::is_same_v<T, ArtifactAdded>) {
          wm.artifacts.push_back(ev.artifact_id);
        } else {
          auto saved = store.load(wm.session_id);
          if (!saved) throw Error(Errc::UnknownSession, wm.session_id);
          wm = *saved;
        }
      },
      event);
  return wm;
}

const ContextSection* ContextBlock::find(std::string_view name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

std::string ContextBlock::render() const {
  std::string out;
  for (const auto& s : sections) {
    out += "[" + s.name + "]\n";
    for (const auto& l : s.lines) out += l + "\n";
  }
  return out;
}

ContextBlock inject_context(const WorkingMemory& wm, const UserProfile& profile, const MemoryFile& file, int k,
                            int memory_limit) {
  ContextBlock block;
  block.sections.push_back({"goal", {wm.goal}});

  if (k > 0) {
    const auto& obs = wm.compressed_observations;
    size_t n = std::min(obs.size(), static_cast<size_t>(k));
    block.sections.push_back({"observations", {obs.end() - static_cast<std::ptrdiff_t>(n), obs.end()}});
  }

  if (profile.enabled && profile.inject && !profile.tag_weights.empty()) {
    std::vector<std::pair<std::string, int>> tags(profile.tag_weights.begin(), profile.tag_weights.end());
    std::stable_sort(tags.begin(), tags.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    ContextSection s{"profile", {}};
    for (size_t i = 0; i < tags.size() && i < 5; ++i) s.lines.push_back(tags[i].first);
    block.sections.push_back(std::move(s));
  }

  if (memory_limit > 0 && !wm.goal.empty()) {
    auto hits = memory_query(wm.goal, file);
    if (!hits.empty()) {
      ContextSection s{"memory", {}};
      for (size_t i = 0; i < hits.size() && i < static_cast<size_t>(memory_limit); ++i) {
        auto it = std::find_if(file.entries.begin(), file.entries.end(),
                               [&](const MemoryEntry& e) { return e.filename == hits[i].filename; });
        std::string line = hits[i].filename;
        if (it != file.entries.end() && !it->free_text.empty()) line += ": " + it->free_text;
        s.lines.push_back(line);
      }
      block.sections.push_back(std::move(s));
    }
  }
  return block;
}

}  // namespace edgeagent::memory
