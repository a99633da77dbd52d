#pragma once

#include <algorithm>
#include <random>
#include <set>

#include "edgeagent/memory/gallery.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::testing {

inline const std::vector<std::string> kObjects = {"parrot", "dog", "cat", "beach ball", "cake", "tree", "car", "kite"};
inline const std::vector<std::string> kScenes = {"beach", "park", "kitchen", "zoo", "street", "garden"};
inline const std::vector<std::string> kEvents = {"birthday", "holiday", "commute", "picnic", "zoo trip", ""};

/// Seeded gallery of `n` assets; some carry text the redactor must catch.
inline std::vector<sim::MediaAsset> random_gallery(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<sim::MediaAsset> out;
  for (int i = 1; i <= n; ++i) {
    sim::MediaAsset a;
    a.asset_id = i;
    a.filename = "IMG_" + std::to_string(1000 + i) + ".jpg";
    a.folder = "DCIM/Camera";
    a.captured_at = static_cast<VirtualMs>(i) * 1000 + static_cast<VirtualMs>(rng() % 500);
    a.width = 4032;
    a.height = 3024;
    size_t k = 1 + rng() % 3;
    for (size_t j = 0; j < k; ++j) a.truth.objects.push_back(kObjects[rng() % kObjects.size()]);
    a.truth.scene = kScenes[rng() % kScenes.size()];
    a.truth.event = kEvents[rng() % kEvents.size()];
    switch (rng() % 10) {
      case 0: a.truth.event += " call 1" + std::to_string(3000000000ULL + rng() % 999999999ULL); break;
      case 1: a.truth.scene += " addr: " + std::to_string(rng() % 99) + " Palm Street"; break;
      case 2: a.truth.event += " id 11010519900307" + std::to_string(1000 + rng() % 9000); break;
      default: break;
    }
    out.push_back(std::move(a));
  }
  return out;
}

/// Brute-force scoring: distinct query tokens found in any field.
inline std::vector<memory::QueryHit> brute_force_query(const std::string& query, const memory::MemoryFile& f) {
  auto qt = text::tokenize(query);
  std::set<std::string> q(qt.begin(), qt.end());
  struct Row {
    memory::QueryHit hit;
    VirtualMs captured;
  };
  std::vector<Row> rows;
  for (const auto& e : f.entries) {
    std::vector<std::string> fields = e.objects;
    fields.push_back(e.scene);
    fields.push_back(e.event);
    fields.push_back(e.free_text);
    std::set<std::string> bag;
    for (const auto& fv : fields)
      for (auto& t : text::tokenize(fv)) bag.insert(t);
    int score = 0;
    for (const auto& t : q) score += bag.count(t) ? 1 : 0;
    if (score >= 1) rows.push_back({{e.filename, score}, e.captured_at});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.hit.score != b.hit.score) return a.hit.score > b.hit.score;
    if (a.captured != b.captured) return a.captured > b.captured;
    return a.hit.filename < b.hit.filename;
  });
  std::vector<memory::QueryHit> out;
  for (auto& r : rows) out.push_back(r.hit);
  return out;
}

}  // namespace edgeagent::testing
