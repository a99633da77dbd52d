#include "edgeagent/agent/extract.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>

#include "edgeagent/error.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::agent {

using nlohmann::json;

const char* domain_name(Domain d) { return d == Domain::ecommerce ? "ecommerce" : "local_service"; }

std::optional<Domain> parse_domain(std::string_view s) {
  if (s == "ecommerce") return Domain::ecommerce;
  if (s == "local_service") return Domain::local_service;
  return std::nullopt;
}

ExtractionSchema ExtractionSchema::for_domain(Domain d) {
  if (d == Domain::ecommerce) return {d, {"title", "price", "sales"}};
  return {d, {"name", "rating", "distance"}};
}

json to_json(const SessionArtifact& a) {
  return {{"artifact_id", a.artifact_id},
          {"schema", {{"domain", domain_name(a.schema.domain)}, {"fields", a.schema.fields}}},
          {"records", a.records},
          {"record_count", a.records.size()},
          {"source_screenshots", a.source_screenshots},
          {"created_at", a.created_at}};
}

SessionArtifact artifact_from_json(const json& j) {
  try {
    SessionArtifact a;
    a.artifact_id = j.at("artifact_id").get<std::string>();
    auto d = parse_domain(j.at("schema").at("domain").get<std::string>());
    if (!d) throw Error(Errc::ParseError, "artifact: unknown domain");
    a.schema = ExtractionSchema::for_domain(*d);
    a.records = j.at("records").get<std::vector<Record>>();
    a.source_screenshots = j.value("source_screenshots", std::vector<std::string>{});
    a.created_at = j.value("created_at", VirtualMs{0});
    return a;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("artifact: ") + e.what());
  }
}

std::string serialize(const SessionArtifact& a) { return to_json(a).dump(2) + "\n"; }

std::vector<Record> FixtureExtractor::extract(const sim::Observation& obs, const ExtractionSchema& schema) {
  auto page = device_.foreground_page();
  if (!page || page->activity != obs.activity) return {};
  std::vector<Record> out;
  for (const auto& item : page->visible_items()) {
    Record r;
    for (const auto& f : schema.fields) {
      auto it = item.find(f);
      r[f] = it == item.end() ? "" : it->second;
    }
    out.push_back(std::move(r));
  }
  return out;
}

SessionArtifact scroll_extract(sim::Device& device, const ExtractionSchema& schema, int passes, Extractor& extractor,
                               std::string artifact_id) {
  if (passes < 0) throw Error(Errc::InvalidArgument, "passes must be >= 0");
  auto page = device.foreground_page();
  if (!page || !page->scrollable()) throw Error(Errc::NotScrollable, page ? page->activity : "no foreground");
  SessionArtifact a;
  a.artifact_id = std::move(artifact_id);
  a.schema = schema;
  a.created_at = device.clock();
  std::set<std::string> seen;
  auto capture = [&] {
    auto obs = device.snapshot();
    a.source_screenshots.push_back(obs.screenshot_id);
    for (auto& r : extractor.extract(obs, schema)) {
      for (const auto& f : schema.fields) r.try_emplace(f, "");
      for (auto it = r.begin(); it != r.end();)
        it = std::find(schema.fields.begin(), schema.fields.end(), it->first) == schema.fields.end() ? r.erase(it)
                                                                                                       : std::next(it);
      if (seen.insert(r[schema.key_field()]).second) a.records.push_back(std::move(r));
    }
  };
  capture();
  for (int i = 0; i < passes; ++i) {
    device.apply_gesture(sim::Scroll{sim::ScrollDirection::down, std::max(1, page->visible_rows)});
    capture();
  }
  return a;
}

namespace {

struct Quoted {
  double value;
  std::string verbatim;
  const Record* record;
};

std::vector<Quoted> numbers_of(const SessionArtifact& a, const std::string& field) {
  std::vector<Quoted> out;
  for (const auto& r : a.records) {
    auto it = r.find(field);
    if (it == r.end()) continue;
    if (auto n = text::first_number(it->second)) out.push_back({std::stod(*n), *n, &r});
  }
  return out;
}

std::pair<const Quoted*, const Quoted*> extremes(const std::vector<Quoted>& q) {
  const Quoted* lo = &q.front();
  const Quoted* hi = &q.front();
  for (const auto& x : q) {
    if (x.value < lo->value) lo = &x;
    if (x.value > hi->value) hi = &x;
  }
  return {lo, hi};
}

}  // namespace

std::string summarize(const SessionArtifact& artifact) {
  if (artifact.records.empty()) throw Error(Errc::EmptyArtifact, artifact.artifact_id);
  const size_t n = artifact.records.size();
  const std::string& key = artifact.schema.key_field();
  std::string out;
  if (artifact.schema.domain == Domain::ecommerce) {
    out = "Found " + std::to_string(n) + (n == 1 ? " result." : " results.");
    auto prices = numbers_of(artifact, "price");
    if (!prices.empty()) {
      auto [lo, hi] = extremes(prices);
      if (lo->value == hi->value) {
        out += " Price: " + lo->verbatim + " (" + lo->record->at(key) + ").";
      } else {
        out += " Cheapest: " + lo->record->at(key) + " at " + lo->verbatim + "; most expensive: " +
               hi->record->at(key) + " at " + hi->verbatim + ".";
      }
    }
  } else {
    out = "Found " + std::to_string(n) + (n == 1 ? " place." : " places.");
    auto ratings = numbers_of(artifact, "rating");
    if (!ratings.empty()) {
      auto hi = extremes(ratings).second;
      out += " Top rated: " + hi->record->at(key) + " (" + hi->verbatim + ").";
    }
    auto distances = numbers_of(artifact, "distance");
    if (!distances.empty()) {
      auto lo = extremes(distances).first;
      out += " Nearest: " + lo->record->at(key) + " (" + lo->verbatim + ").";
    }
  }
  return out;
}

std::optional<int> parse_ordinal(std::string_view utterance) {
  static const std::map<std::string, int> words{{"first", 1}, {"second", 2}, {"third", 3},  {"fourth", 4},
                                                {"fifth", 5}, {"sixth", 6},  {"seventh", 7}, {"eighth", 8},
                                                {"ninth", 9}, {"tenth", 10}};
  static const std::regex numeric(R"(^(\d+)(st|nd|rd|th)$)");
  for (const auto& tok : text::tokenize(utterance)) {
    if (auto it = words.find(tok); it != words.end()) return it->second;
    std::smatch m;
    if (std::regex_match(tok, m, numeric) && m[1].length() <= 6) return std::stoi(m[1].str());
  }
  return std::nullopt;
}

Decision resolve_followup(std::string_view utterance, const SessionArtifact* artifact, const sim::Device& device,
                          grounding::VisualGrounder& grounder) {
  if (!artifact) throw Error(Errc::NoArtifact, "no artifact in this session");
  auto rank = parse_ordinal(utterance);
  if (!rank) throw Error(Errc::InvalidArgument, "no ordinal in '" + std::string(utterance) + "'");
  if (*rank < 1 || static_cast<size_t>(*rank) > artifact->records.size())
    throw Error(Errc::OrdinalOutOfRange, std::to_string(*rank) + " of " + std::to_string(artifact->records.size()));
  const Record& rec = artifact->records[static_cast<size_t>(*rank - 1)];
  const std::string& key = rec.at(artifact->schema.key_field());

  auto page = device.foreground_page();
  if (!page) throw Error(Errc::NoForeground, "follow-up with nothing on screen");
  if (page->items && page->visible_rows > 0) {
    const auto& items = *page->items;
    auto it = std::find_if(items.begin(), items.end(), [&](const sim::ItemRecord& item) {
      auto f = item.find(artifact->schema.key_field());
      return f != item.end() && f->second == key;
    });
    if (it != items.end()) {
      int idx = static_cast<int>(it - items.begin());
      int first = page->scroll_offset, last = page->scroll_offset + page->visible_rows - 1;
      if (idx < first)
        return Decision::act(sim::Gesture{sim::Scroll{sim::ScrollDirection::up, first - idx}},
                             "bring record " + std::to_string(*rank) + " into view");
      if (idx > last)
        return Decision::act(sim::Gesture{sim::Scroll{sim::ScrollDirection::down, idx - last}},
                             "bring record " + std::to_string(*rank) + " into view");
    }
  }
  auto g = grounding::hybrid_ground(device.snapshot(), {key, std::nullopt}, grounder);
  return Decision::act(sim::Gesture{sim::Tap{g.point}},
                       "open record " + std::to_string(*rank) + " '" + key + "' (" + grounding::source_name(g.source) + ")");
}

void ArtifactStore::put(const std::string& session, const SessionArtifact& a) {
  std::lock_guard lock(mu_);
  if (root_) {
    auto dir = *root_ / "sessions" / session / "artifacts";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(dir / (a.artifact_id + ".json"), std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::StorageWriteFailure, "cannot write artifact " + a.artifact_id);
    out << serialize(a);
  }
  items_[{session, a.artifact_id}] = a;
}

std::optional<SessionArtifact> ArtifactStore::get(const std::string& session, const std::string& artifact_id) const {
  std::lock_guard lock(mu_);
  if (auto it = items_.find({session, artifact_id}); it != items_.end()) return it->second;
  if (!root_) return std::nullopt;
  std::ifstream in(*root_ / "sessions" / session / "artifacts" / (artifact_id + ".json"));
  if (!in) return std::nullopt;
  return artifact_from_json(json::parse(in));
}

std::optional<std::filesystem::path> ArtifactStore::path_of(const std::string& session,
                                                            const std::string& artifact_id) const {
  if (!root_) return std::nullopt;
  return *root_ / "sessions" / session / "artifacts" / (artifact_id + ".json");
}

}  // namespace edgeagent::agent
