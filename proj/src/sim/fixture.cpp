#include "edgeagent/sim/fixture.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "edgeagent/error.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::sim {
namespace {

using Lookup = std::function<std::optional<std::string>(std::string_view)>;

Lookup lookup_for(const Params& params, const ItemRecord* item) {
  return [&params, item](std::string_view name) -> std::optional<std::string> {
    if (item && name.substr(0, 5) == "item.") {
      auto it = item->find(std::string(name.substr(5)));
      if (it != item->end()) return it->second;
      return std::nullopt;
    }
    auto it = params.find(std::string(name));
    if (it != params.end()) return it->second;
    return std::nullopt;
  };
}

TapEffect resolve(const TapEffect& e, const Lookup& lookup) {
  TapEffect out = e;
  out.app = text::substitute(e.app, lookup);
  out.activity = text::substitute(e.activity, lookup);
  out.data_uri = text::substitute(e.data_uri, lookup);
  out.item_id = text::substitute(e.item_id, lookup);
  for (auto& [k, v] : out.extras) v = text::substitute(v, lookup);
  for (auto& [k, v] : out.set) v = text::substitute(v, lookup);
  return out;
}

std::string format_fixed(std::int64_t raw, int decimals) {
  if (decimals <= 0) return std::to_string(raw);
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  std::string frac = std::to_string(raw % scale);
  frac.insert(0, static_cast<size_t>(decimals) - frac.size(), '0');
  return std::to_string(raw / scale) + "." + frac;
}

std::vector<ItemRecord> generate_items(const ItemGenerator& gen, const std::string& key,
                                       const Params& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ text::fnv1a64(key));
  std::vector<ItemRecord> out;
  for (int i = 1; i <= gen.count; ++i) {
    ItemRecord item;
    Params scope = params;
    scope["i"] = std::to_string(i);
    for (const auto& [field, fg] : gen.fields) {
      if (fg.numeric) {
        std::int64_t scale = 1;
        for (int d = 0; d < fg.decimals; ++d) scale *= 10;
        auto lo = fg.min * scale;
        auto span = static_cast<std::uint64_t>((fg.max - fg.min) * scale + 1);
        item[field] = format_fixed(lo + static_cast<std::int64_t>(rng() % span), fg.decimals);
      } else {
        item[field] = text::substitute(fg.tmpl, lookup_for(scope, nullptr));
      }
    }
    if (!item.count("id")) item["id"] = std::to_string(i);
    out.push_back(std::move(item));
  }
  return out;
}

UiNode build_node(const NodeSpec& spec, const Lookup& lookup, std::map<std::string, TapEffect>& effects) {
  UiNode n;
  n.node_id = spec.id;
  n.role = spec.role;
  n.text = text::substitute(spec.text, lookup);
  n.content_desc = text::substitute(spec.content_desc, lookup);
  n.resource_id = spec.resource_id;
  n.bounds = spec.bounds;
  n.clickable = spec.clickable || spec.on_tap.has_value();
  n.scrollable = spec.scrollable;
  if (spec.on_tap) effects[spec.id] = resolve(*spec.on_tap, lookup);
  for (const auto& c : spec.children) n.children.push_back(build_node(c, lookup, effects));
  return n;
}

void collect_render(const UiNode& n, std::vector<RenderText>& out) {
  if (!n.text.empty()) out.push_back({n.text, n.bounds, TextOrigin::structural, n.node_id});
  for (const auto& c : n.children) collect_render(c, out);
}

void check_node(const NodeSpec& n, const Rect& parent, std::set<std::string>& ids,
                const std::string& where) {
  if (n.id.empty() || n.id.find('/') != std::string::npos)
    throw Error(Errc::InvalidArgument, where + ": node id must be non-empty without '/'");
  if (!ids.insert(n.id).second) throw Error(Errc::InvalidArgument, where + ": duplicate node id " + n.id);
  if (!parent.contains(n.bounds))
    throw Error(Errc::InvalidArgument, where + ": node " + n.id + " escapes its parent bounds");
  for (const auto& c : n.children) check_node(c, n.bounds, ids, where);
}

}  // namespace

const ActivitySpec* SimApp::find(std::string_view activity) const {
  for (const auto& a : activities)
    if (a.name == activity) return &a;
  return nullptr;
}

ActivitySpec* SimApp::find(std::string_view activity) {
  for (auto& a : activities)
    if (a.name == activity) return &a;
  return nullptr;
}

void validate(const SimApp& app) {
  if (app.app_id.empty() || app.app_id.find_first_of("/ ") != std::string::npos)
    throw Error(Errc::InvalidArgument, "app_id must be non-empty without '/' or spaces");
  std::set<std::string> names;
  for (const auto& a : app.activities) {
    std::string where = app.app_id + "/" + a.name;
    if (a.name.empty() || !names.insert(a.name).second)
      throw Error(Errc::InvalidArgument, where + ": activity names must be unique and non-empty");
    if (a.name.find_first_of("/ \t\r\n") != std::string::npos)
      throw Error(Errc::InvalidArgument, where + ": activity name must not contain '/' or whitespace");
    for (const auto& p : a.deeplinks) (void)UriTemplate{p};
    std::set<std::string> ids{"root"};
    for (const auto& n : a.nodes) check_node(n, kScreenRect, ids, where);
    if (a.list) {
      if (!ids.insert(a.list->id).second) throw Error(Errc::InvalidArgument, where + ": list id clashes");
      if (!kScreenRect.contains(a.list->bounds) || a.list->row_height <= 0)
        throw Error(Errc::InvalidArgument, where + ": bad list geometry");
    }
    for (const auto& o : a.overlays)
      if (!kScreenRect.contains(o.bbox)) throw Error(Errc::InvalidArgument, where + ": overlay off screen");
  }
  if (!app.find(app.home_activity))
    throw Error(Errc::InvalidArgument, app.app_id + ": home_activity names no activity");
}

std::vector<std::string> selected_ids(const Params& params) {
  auto it = params.find("selected");
  if (it == params.end() || it->second.empty()) return {};
  return text::split(it->second, ',');
}

std::vector<ItemRecord> Page::visible_items() const {
  if (!items || visible_rows <= 0) return {};
  std::vector<ItemRecord> out;
  for (int i = scroll_offset; i < scroll_offset + visible_rows && i < static_cast<int>(items->size()); ++i)
    out.push_back((*items)[static_cast<size_t>(i)]);
  return out;
}

Page build_page(const SimApp& app, const ActivitySpec& activity, const Params& params,
                int scroll_offset, std::uint64_t seed, const FolderMap& folders) {
  Page page;
  page.app_id = app.app_id;
  page.activity = activity.name;
  page.params = params;
  page.visual_truth = activity.visual_truth;

  auto lookup = lookup_for(params, nullptr);
  page.ui_root.node_id = "root";
  page.ui_root.role = Role::container;
  page.ui_root.bounds = kScreenRect;
  for (const auto& spec : activity.nodes) page.ui_root.children.push_back(build_node(spec, lookup, page.effects));

  if (activity.list) {
    const ListSpec& ls = *activity.list;
    std::vector<ItemRecord> items = ls.items;
    if (ls.generate) {
      auto more = generate_items(*ls.generate, app.app_id + "/" + activity.name, params, seed);
      items.insert(items.end(), more.begin(), more.end());
    }
    if (!ls.source_folder.empty()) {
      auto it = folders.find(text::substitute(ls.source_folder, lookup));
      if (it != folders.end())
        for (const auto& f : it->second) items.push_back({{"id", f}, {"title", f}});
    }
    page.list_id = ls.id;
    page.visible_rows = std::max(1, ls.bounds.h / ls.row_height);
    page.max_scroll = std::max(0, static_cast<int>(items.size()) - page.visible_rows);
    page.scroll_offset = std::clamp(scroll_offset, 0, page.max_scroll);

    std::vector<std::string> fields = ls.display_fields;
    if (fields.empty()) fields = {"title"};
    auto selected = selected_ids(params);

    UiNode list;
    list.node_id = ls.id;
    list.role = Role::list;
    list.bounds = ls.bounds;
    list.scrollable = true;
    int end = std::min(static_cast<int>(items.size()), page.scroll_offset + page.visible_rows);
    for (int idx = page.scroll_offset; idx < end; ++idx) {
      const ItemRecord& item = items[static_cast<size_t>(idx)];
      auto item_lookup = lookup_for(params, &item);
      UiNode row;
      row.node_id = ls.id + "/row" + std::to_string(idx);
      row.role = Role::container;
      row.bounds = {ls.bounds.x, ls.bounds.y + (idx - page.scroll_offset) * ls.row_height, ls.bounds.w,
                    ls.row_height};
      auto id_it = item.find("id");
      std::string item_id = id_it != item.end() ? id_it->second : std::to_string(idx + 1);
      if (ls.selectable) {
        row.clickable = true;
        if (std::find(selected.begin(), selected.end(), item_id) != selected.end())
          row.content_desc = "selected";
        TapEffect toggle;
        toggle.kind = TapEffect::Kind::toggle_select;
        toggle.item_id = item_id;
        page.effects[row.node_id] = toggle;
      } else if (ls.on_tap_item) {
        row.clickable = true;
        page.effects[row.node_id] = resolve(*ls.on_tap_item, item_lookup);
      }
      int n = static_cast<int>(fields.size());
      for (int k = 0; k < n; ++k) {
        UiNode cell;
        cell.node_id = row.node_id + "/" + fields[static_cast<size_t>(k)];
        cell.role = Role::text;
        auto f = item.find(fields[static_cast<size_t>(k)]);
        cell.text = f == item.end() ? std::string() : f->second;
        int x0 = row.bounds.x + k * row.bounds.w / n;
        int x1 = row.bounds.x + (k + 1) * row.bounds.w / n;
        cell.bounds = {x0, row.bounds.y, x1 - x0, row.bounds.h};
        row.children.push_back(std::move(cell));
      }
      list.children.push_back(std::move(row));
    }
    page.ui_root.children.push_back(std::move(list));
    page.items = std::move(items);
  }

  collect_render(page.ui_root, page.render_layer);
  for (const auto& o : activity.overlays) {
    page.render_layer.push_back({text::substitute(o.text, lookup), o.bbox, TextOrigin::overlay_only, std::nullopt});
    if (o.on_tap) page.overlay_effects.emplace_back(o.bbox, resolve(*o.on_tap, lookup));
  }
  return page;
}

}  // namespace edgeagent::sim
