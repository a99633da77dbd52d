#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "edgeagent/memory/redact.hpp"
#include "edgeagent/sim/device.hpp"

namespace edgeagent::memory {

enum class SummaryKind { model, metadata_fallback };

struct MemoryEntry {
  std::string filename;
  VirtualMs captured_at = 0;
  SummaryKind kind = SummaryKind::model;
  std::vector<std::string> objects;
  std::string scene;
  std::string event;
  std::string free_text;

  friend bool operator==(const MemoryEntry&, const MemoryEntry&) = default;
};

struct MemoryFile {
  std::vector<MemoryEntry> entries;
  std::int64_t cursor = 0;

  friend bool operator==(const MemoryFile&, const MemoryFile&) = default;
};

/// Markdown-style layout: a `# gallery-memory v1` header, `cursor: <id>`,
/// then one `## <filename>` section of `- key: value` lines per entry.
std::string serialize(const MemoryFile& file);
/// Throws Error(ParseError).
MemoryFile parse_memory_file(std::string_view text);

/// The on-disk memory file. Writes replace the whole file atomically.
class MemoryStore {
 public:
  explicit MemoryStore(std::filesystem::path path);

  /// Missing file reads as empty.
  MemoryFile load() const;
  /// Throws Error(StorageWriteFailure); the previous file stays intact.
  void save(const MemoryFile& file) const;
  std::string raw() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct UserProfile {
  std::map<std::string, int> tag_weights;
  bool enabled = true;  // gallery memory on/off
  bool inject = true;   // profile injected into downstream context

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct MediaSummary {
  std::vector<std::string> objects;
  std::string scene;
  std::string event;
  std::string free_text;
};

/// Semantic image summarizer; throws on failure.
class Summarizer {
 public:
  virtual ~Summarizer() = default;
  virtual MediaSummary summarize(const sim::MediaAsset& asset) = 0;
};

/// Reads the fixture's ground-truth descriptor. Can be told to fail on
/// specific assets (or all of them) to exercise the fallback path.
class FixtureSummarizer : public Summarizer {
 public:
  FixtureSummarizer() = default;
  explicit FixtureSummarizer(std::vector<std::int64_t> failing_ids, bool fail_all = false);
  MediaSummary summarize(const sim::MediaAsset& asset) override;
  int calls() const { return calls_; }

 private:
  std::vector<std::int64_t> failing_;
  bool fail_all_ = false;
  int calls_ = 0;
};

struct SyncResult {
  std::vector<MemoryEntry> appended;
  UserProfile profile;
};

/// Incremental producer: summarizes media newer than the cursor, redacts,
/// appends, advances the cursor and folds tags into the profile. Writes
/// nothing when there is nothing new.
SyncResult memory_sync(const sim::Device& media, Summarizer& summarizer, const RedactionPolicy& policy,
                       const MemoryStore& store, const UserProfile& profile);

/// Entry built from file metadata only.
MemoryEntry metadata_entry(const sim::MediaAsset& asset);

struct QueryHit {
  std::string filename;
  int score = 0;

  friend bool operator==(const QueryHit&, const QueryHit&) = default;
};

/// Token-overlap retrieval: score = distinct query tokens found among the
/// entry's objects, scene, event and free-text tokens. Ordered by score,
/// then newest capture, then filename.
std::vector<QueryHit> memory_query(std::string_view query, const MemoryFile& file);

struct StagingResult {
  std::string path;
  std::vector<std::string> staged;
};

/// Reconciles `filenames` with the media store and stages the survivors in
/// `staging/<task_id>/`. Throws Error(EmptyAfterReconcile).
StagingResult stage(const std::vector<std::string>& filenames, sim::Device& media, const std::string& task_id);

std::vector<std::string> profile_tags(const MemoryEntry& e);

}  // namespace edgeagent::memory
