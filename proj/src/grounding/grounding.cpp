#include "edgeagent/grounding/grounding.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "edgeagent/error.hpp"
#include "edgeagent/sim/device.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::grounding {

const char* source_name(GroundSource s) {
  switch (s) {
    case GroundSource::xml: return "xml";
    case GroundSource::ocr: return "ocr";
    case GroundSource::visual: return "visual";
  }
  return "?";
}

std::optional<Rect> FixtureGrounder::locate(const std::string& screenshot_id, const std::string& query) {
  auto cap = device_.capture(screenshot_id);
  if (!cap) return std::nullopt;
  const std::string q = text::normalize(query);
  for (const auto& [key, rect] : cap->visual_truth)
    if (text::normalize(key) == q) return rect;
  return std::nullopt;
}

double field_score(const std::vector<std::string>& target_tokens, std::string_view field) {
  if (target_tokens.empty()) return 0.0;
  auto ft = text::tokenize(field);
  std::set<std::string> fs(ft.begin(), ft.end());
  std::set<std::string> ts(target_tokens.begin(), target_tokens.end());
  for (const auto& t : ts)
    if (!fs.count(t)) return 0.0;
  return static_cast<double>(ts.size()) / static_cast<double>(fs.size());
}

namespace {

struct Candidate {
  Rect bbox;
  double score;
  size_t order;
  std::optional<std::string> node;
};

Rect clip(const Rect& r) {
  int x0 = std::max(r.x, 0), y0 = std::max(r.y, 0);
  int x1 = std::min(r.right(), kScreenWidth), y1 = std::min(r.bottom(), kScreenHeight);
  return {x0, y0, x1 - x0, y1 - y0};
}

bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.bbox.area() != b.bbox.area()) return a.bbox.area() < b.bbox.area();
  if (a.bbox.y != b.bbox.y) return a.bbox.y < b.bbox.y;
  if (a.bbox.x != b.bbox.x) return a.bbox.x < b.bbox.x;
  return a.order < b.order;
}

std::optional<GroundingResult> pick(const std::vector<Candidate>& cands, GroundSource src, double tau) {
  const Candidate* best = nullptr;
  for (const auto& c : cands)
    if (c.score >= tau && (!best || better(c, *best))) best = &c;
  if (!best) return std::nullopt;
  return GroundingResult{best->bbox.center(), best->bbox, src, best->node, best->score};
}

}  // namespace

GroundingResult hybrid_ground(const sim::Observation& obs, const TargetSpec& target, VisualGrounder& model,
                              double tau) {
  if (text::trim(target.query).empty()) throw Error(Errc::InvalidArgument, "empty grounding query");
  const auto tokens = text::tokenize(target.query);

  if (!tokens.empty()) {
    std::vector<Candidate> xml;
    size_t order = 0;
    sim::walk(obs.ui_root, [&](const sim::UiNode& n, bool ancestor_clickable) {
      size_t idx = order++;
      if (!(n.clickable || ancestor_clickable)) return;
      if (target.role_hint && n.role != *target.role_hint) return;
      Rect box = clip(n.bounds);
      if (box.degenerate()) return;
      double s = std::max({field_score(tokens, n.text), field_score(tokens, n.content_desc),
                           field_score(tokens, n.resource_id)});
      if (s > 0) xml.push_back({box, s, idx, n.node_id});
    });
    if (auto r = pick(xml, GroundSource::xml, tau)) return *r;

    std::vector<Candidate> ocr;
    for (size_t i = 0; i < obs.render_layer.size(); ++i) {
      const auto& rt = obs.render_layer[i];
      Rect box = clip(rt.bbox);
      if (box.degenerate()) continue;
      double s = field_score(tokens, rt.text);
      if (s > 0) ocr.push_back({box, s, i, rt.backing_node});
    }
    if (auto r = pick(ocr, GroundSource::ocr, tau)) return *r;
  }

  if (auto box = model.locate(obs.screenshot_id, target.query)) {
    Rect b = clip(*box);
    if (!b.degenerate()) return {b.center(), b, GroundSource::visual, std::nullopt, 1.0};
  }
  throw Error(Errc::NoTarget, target.query);
}

}  // namespace edgeagent::grounding
