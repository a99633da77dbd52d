#include <csignal>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "edgeagent/error.hpp"
#include "edgeagent/host/fixture_json.hpp"
#include "edgeagent/host/runtime.hpp"
#include "edgeagent/host/server.hpp"

namespace fs = std::filesystem;
using namespace edgeagent;
using nlohmann::json;

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

host::RuntimeOptions options_for(const std::string& root) {
  host::RuntimeOptions o;
  if (!root.empty()) o.root = fs::path(root);
  o.model = host::ModelEndpointConfig::from_env();
  return o;
}

host::Scenario scenario_or_empty(const std::string& path) {
  if (path.empty()) return host::Scenario{};
  return host::load_scenario(path);
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_run(const std::string& path, const std::string& root) {
  auto report = host::run_scenario(path, options_for(root));
  print(host::to_json(report));
  for (const auto& e : report.expectations)
    if (!e.passed) std::cerr << "FAIL step " << e.step << " " << e.probe << ": " << e.message << "\n";
  std::cerr << report.name << ": " << report.passed() << " passed, " << report.failed() << " failed\n";
  return report.ok() ? 0 : 1;
}

// Reads one action per stdin line: a gesture object, or {"intent": {...}}.
int cmd_record(const std::string& session, const std::string& name, const std::string& scenario,
               const std::string& root) {
  auto sc = scenario_or_empty(scenario);
  host::Runtime rt(sc, options_for(root));
  rt.recorder().start(session);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::ParseError, "not JSON: " + line);
    if (j.contains("intent")) {
      auto r = rt.device().launch_intent(sim::intent_from_json(j.at("intent")), j.value("privileged", false));
      if (r.error) throw Error(*r.error, "launch failed");
    } else {
      rt.device().apply_gesture(sim::gesture_from_json(j));
    }
  }
  auto r = rt.clone(session, name.empty() ? std::nullopt : std::optional<std::string>(name));
  print({{"trace_id", r.trace_id},
         {"trajectory", clone::to_json(r.trajectory)},
         {"skill", host::to_json(r.card)},
         {"bookmark", host::to_json(r.bookmark)}});
  return 0;
}

int cmd_replay(const std::string& bookmark, const std::string& scenario, const std::string& root) {
  auto sc = scenario_or_empty(scenario);
  host::Runtime rt(sc, options_for(root));
  print(host::to_json(rt.replay(bookmark)));
  return 0;
}

int cmd_memory_sync(const std::string& scenario, const std::string& root) {
  auto sc = scenario_or_empty(scenario);
  host::Runtime rt(sc, options_for(root));
  auto r = rt.sync_memory();
  json appended = json::array();
  for (const auto& e : r.appended) appended.push_back(host::to_json(e));
  print({{"appended", appended}, {"cursor", rt.gallery().load().cursor}});
  return 0;
}

int cmd_memory_query(const std::string& q, const std::string& root) {
  memory::MemoryStore store(fs::path(root) / "memory" / "gallery.md");
  json hits = json::array();
  for (const auto& h : memory::memory_query(q, store.load())) hits.push_back({{"filename", h.filename}, {"score", h.score}});
  print(hits);
  return 0;
}

int cmd_skills_list(const std::string& root) {
  clone::SkillStore skills(fs::path(root) / "skills", ".skill");
  json out = json::array();
  for (const auto& c : skills.list()) out.push_back(host::to_json(c));
  print(out);
  return 0;
}

int cmd_serve(const std::string& host_addr, int port, const std::string& scenario, const std::string& root) {
  auto sc = scenario_or_empty(scenario);
  host::Runtime rt(sc, options_for(root));
  host::Server server(rt);
  int bound = server.bind(host_addr, port);
  std::cerr << "listening on " << host_addr << ":" << bound << "\n";
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.start();
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgeagent: on-device mobile agent runtime over a simulated handset"};
  app.require_subcommand(1);
  std::string root, scenario;
  app.add_option("--root", root, "Persistence root (skills/, bookmarks/, memory/, sessions/, traces/)");
  app.add_option("--scenario", scenario, "Scenario file providing the device fixtures");

  std::string run_path;
  auto* run = app.add_subcommand("run", "Execute a scenario script and report expectations");
  run->add_option("scenario", run_path)->required()->check(CLI::ExistingFile);

  std::string session, clone_name;
  auto* record = app.add_subcommand("record", "Record actions from stdin and clone them into a skill");
  record->add_option("session", session)->required();
  record->add_option("--name", clone_name, "Override the distilled skill name");

  std::string bookmark;
  auto* replay = app.add_subcommand("replay", "Restore a bookmarked page through the replay ladder");
  replay->add_option("bookmark", bookmark)->required();

  auto* mem = app.add_subcommand("memory", "Gallery memory");
  mem->require_subcommand(1);
  auto* mem_sync = mem->add_subcommand("sync", "Summarize new media into the memory file");
  std::string query;
  auto* mem_query = mem->add_subcommand("query", "Rank memory entries against a query");
  mem_query->add_option("q", query)->required();

  auto* skills = app.add_subcommand("skills", "Skill cards");
  skills->require_subcommand(1);
  auto* skills_list = skills->add_subcommand("list", "List stored skill cards");

  int port = 8080;
  std::string host_addr = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Expose the device and agent over HTTP");
  serve->add_option("--port", port, "Port; 0 picks a free one");
  serve->add_option("--host", host_addr, "Bind address");

  CLI11_PARSE(app, argc, argv);

  auto need_root = [&] {
    if (root.empty()) throw Error(Errc::InvalidArgument, "--root is required");
  };
  try {
    if (*run) return cmd_run(run_path, root);
    if (*record) return cmd_record(session, clone_name, scenario, root);
    if (*replay) return cmd_replay(bookmark, scenario, root);
    if (*mem_sync) return cmd_memory_sync(scenario, root);
    if (*mem_query) {
      need_root();
      return cmd_memory_query(query, root);
    }
    if (*skills_list) {
      need_root();
      return cmd_skills_list(root);
    }
    if (*serve) return cmd_serve(host_addr, port, scenario, root);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
