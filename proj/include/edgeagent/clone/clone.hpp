#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "edgeagent/sim/device.hpp"

namespace edgeagent::clone {

// ---- dump parsing ----

struct DumpRecord {
  std::optional<int> task_id;
  std::string task_app;  // from the TASK line; empty if that line was unreadable
  std::string app_id;    // from the ACTIVITY line
  std::string activity;
  sim::IntentMsg intent;
  size_t block = 0;  // ordinal of the enclosing TASK block; 0 before any

  friend bool operator==(const DumpRecord&, const DumpRecord&) = default;
};

struct DumpParse {
  std::vector<DumpRecord> records;  // per task, bottom to top
  std::vector<std::string> warnings;
};

/// Total: never throws; skipped lines are reported as warnings.
DumpParse parse_dump(std::string_view text);

/// Parses one `intent={...}` line (leading spaces allowed).
std::optional<sim::IntentMsg> parse_intent_line(std::string_view line);

// ---- signatures and traces ----

struct PageSignature {
  std::string activity;
  std::vector<std::string> top_texts;
  std::string digest;

  friend bool operator==(const PageSignature&, const PageSignature&) = default;
};

inline constexpr size_t kSignatureTexts = 8;

/// Up to 8 structural texts ordered by (y, x).
PageSignature page_signature(const std::string& activity, const std::vector<sim::RenderText>& layer);
PageSignature page_signature(const sim::Page& page);
std::string signature_digest(const std::string& activity, const std::vector<std::string>& top_texts);

/// Activity equal and at least half the signature's texts visible.
bool signature_validates(const PageSignature& sig, const sim::Page& page);

struct TraceStep {
  VirtualMs timestamp = 0;
  PageSignature pre_signature;
  sim::DeviceAction action;
  std::string post_activity;
};

struct TrajectoryFinal {
  std::string app_id;
  std::string activity;
  sim::Params params;
};

struct Trajectory {
  std::string session;
  std::vector<TraceStep> steps;
  TrajectoryFinal final;
};

nlohmann::json to_json(const PageSignature& s);
PageSignature signature_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const nlohmann::json& j);

/// Captures every gesture and launch between start and stop.
class Recorder : public sim::DeviceObserver {
 public:
  explicit Recorder(sim::Device& device);
  ~Recorder() override;
  Recorder(const Recorder&) = delete;
  Recorder& operator=(const Recorder&) = delete;

  /// Throws Error(AlreadyRecording).
  void start(const std::string& session);
  /// Throws Error(NotRecording).
  Trajectory stop(const std::string& session);
  bool recording() const { return active_.has_value(); }
  const std::optional<std::string>& session() const { return active_; }

  void on_action(const sim::Device& device, const sim::DeviceAction& action,
                 const std::optional<sim::Page>& before) override;

 private:
  sim::Device& device_;
  std::optional<std::string> active_;
  std::vector<TraceStep> steps_;
};

// ---- introspection ----

enum class CaptureMethod { keyword_filter, full_parse };
const char* capture_method_name(CaptureMethod m);

struct LaunchDescriptor {
  std::string action = sim::kActionView;
  std::optional<std::string> data_uri;
  sim::ComponentName component;
  std::map<std::string, std::string> extras;
  CaptureMethod capture_method = CaptureMethod::keyword_filter;

  friend bool operator==(const LaunchDescriptor&, const LaunchDescriptor&) = default;
};

/// Same launch fields, capture method ignored.
bool same_launch(const LaunchDescriptor& a, const LaunchDescriptor& b);
sim::IntentMsg to_intent(const LaunchDescriptor& d);

using DumpProvider = std::function<std::string()>;

/// Stage 1 only: the app's TASK block, top ACTIVITY. nullopt if it misses.
std::optional<LaunchDescriptor> keyword_filter_entry(const std::string& app_id, std::string_view dump);
/// Stage 2 only: full parse; the top record of the first block owned by the
/// app, else the app's last record anywhere.
std::optional<LaunchDescriptor> full_parse_entry(const std::string& app_id, std::string_view dump);

/// Stage 1, falling back to stage 2. Throws Error(AppNotRunning).
LaunchDescriptor introspect_entry(const std::string& app_id, const DumpProvider& dump);

// ---- skills and bookmarks ----

struct Bookmark {
  std::string name;
  LaunchDescriptor descriptor;
  PageSignature signature;
  std::string summary;
  std::int64_t created_at = 0;
};

struct SkillCard {
  std::string name;
  std::string description;
  std::vector<std::string> triggers;
  std::string target_app;
  LaunchDescriptor entry;  // data_uri may hold {slot} placeholders
  std::string trajectory_ref;
  std::vector<std::string> parameters;
  std::int64_t created_at = 0;
};

/// Names and describes a page; throws on failure.
class PageSummarizer {
 public:
  virtual ~PageSummarizer() = default;
  struct Summary {
    std::string name;
    std::string description;
  };
  virtual Summary summarize_page(const std::string& app_id, const PageSignature& sig) = 0;
};

/// Activity name plus the top text.
class FixturePageSummarizer : public PageSummarizer {
 public:
  explicit FixturePageSummarizer(bool fail = false) : fail_(fail) {}
  Summary summarize_page(const std::string& app_id, const PageSignature& sig) override;

 private:
  bool fail_;
};

/// Lowercase content words, stopwords dropped, first occurrence order.
std::vector<std::string> content_words(std::string_view s);

/// Throws Error(FinalMismatch) when the trajectory ends elsewhere.
SkillCard distill_skill(const Trajectory& traj, const LaunchDescriptor& descriptor, const PageSignature& final_sig,
                        PageSummarizer& summarizer, const std::string& trajectory_ref, std::int64_t created_at);

/// Entry intent with the card's {slot} placeholders bound.
sim::IntentMsg bind_skill(const SkillCard& card, const sim::Params& slots);

std::string serialize(const Bookmark& b);
Bookmark parse_bookmark(std::string_view text);
std::string serialize(const SkillCard& c);
SkillCard parse_skill_card(std::string_view text);

/// Name-keyed records mirrored to one file per record when a directory is
/// given. Concurrent reads, exclusive writes.
template <typename T>
class FileStore {
 public:
  FileStore() = default;
  FileStore(std::filesystem::path dir, std::string extension);

  void put(const T& value);
  std::optional<T> get(const std::string& name) const;
  std::vector<T> list() const;
  bool contains(const std::string& name) const;
  size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, T> items_;
  std::optional<std::filesystem::path> dir_;
  std::string ext_;
};

using BookmarkStore = FileStore<Bookmark>;
using SkillStore = FileStore<SkillCard>;

/// Traces as JSON under `<dir>/<id>.json`.
class TraceStore {
 public:
  TraceStore() = default;
  explicit TraceStore(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::string put(const Trajectory& t);
  std::optional<Trajectory> get(const std::string& id) const;
  size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, Trajectory> traces_;
  std::optional<std::filesystem::path> dir_;
};

// ---- replay ----

enum class ReplayTier { full_intent, deeplink, bare_component, task_stack_restore };
const char* tier_name(ReplayTier t);

struct ReplayAttempt {
  ReplayTier tier;
  bool success = false;
  std::string detail;
};

struct ReplayOutcome {
  ReplayTier tier_used;
  sim::Page page;
  std::vector<ReplayAttempt> attempts;
};

/// Four tiers, all unprivileged; a failed attempt leaves no trace on the
/// device. Throws Error(AllTiersFailed).
ReplayOutcome replay(const Bookmark& bookmark, sim::Device& device);

}  // namespace edgeagent::clone
