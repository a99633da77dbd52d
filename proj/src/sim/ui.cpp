#include "edgeagent/sim/ui.hpp"

#include "edgeagent/error.hpp"

namespace edgeagent::sim {

using nlohmann::json;

const char* role_name(Role r) {
  switch (r) {
    case Role::button: return "button";
    case Role::text: return "text";
    case Role::input: return "input";
    case Role::list: return "list";
    case Role::image: return "image";
    case Role::container: return "container";
  }
  return "container";
}

std::optional<Role> parse_role(std::string_view s) {
  for (Role r : {Role::button, Role::text, Role::input, Role::list, Role::image, Role::container})
    if (s == role_name(r)) return r;
  return std::nullopt;
}

const UiNode* find_node(const UiNode& root, std::string_view node_id) {
  if (root.node_id == node_id) return &root;
  for (const auto& c : root.children)
    if (const auto* hit = find_node(c, node_id)) return hit;
  return nullptr;
}

json rect_json(const Rect& r) { return json::array({r.x, r.y, r.w, r.h}); }

Rect rect_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw Error(Errc::ParseError, "rect must be [x, y, w, h]");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

json to_json(const UiNode& n) {
  json children = json::array();
  for (const auto& c : n.children) children.push_back(to_json(c));
  return {{"node_id", n.node_id},     {"role", role_name(n.role)},
          {"text", n.text},           {"content_desc", n.content_desc},
          {"resource_id", n.resource_id}, {"bounds", rect_json(n.bounds)},
          {"clickable", n.clickable}, {"scrollable", n.scrollable},
          {"children", std::move(children)}};
}

UiNode ui_node_from_json(const json& j) {
  UiNode n;
  n.node_id = j.at("node_id").get<std::string>();
  n.role = parse_role(j.at("role").get<std::string>()).value_or(Role::container);
  n.text = j.value("text", "");
  n.content_desc = j.value("content_desc", "");
  n.resource_id = j.value("resource_id", "");
  n.bounds = rect_from_json(j.at("bounds"));
  n.clickable = j.value("clickable", false);
  n.scrollable = j.value("scrollable", false);
  for (const auto& c : j.value("children", json::array())) n.children.push_back(ui_node_from_json(c));
  return n;
}

json to_json(const RenderText& t) {
  json j = {{"text", t.text},
            {"bbox", rect_json(t.bbox)},
            {"origin", t.origin == TextOrigin::structural ? "structural" : "overlay_only"}};
  j["backing_node"] = t.backing_node ? json(*t.backing_node) : json(nullptr);
  return j;
}

json to_json(const Observation& o) {
  json layer = json::array();
  for (const auto& t : o.render_layer) layer.push_back(to_json(t));
  return {{"app_id", o.app_id},
          {"activity", o.activity},
          {"params", o.params},
          {"ui_root", to_json(o.ui_root)},
          {"render_layer", std::move(layer)},
          {"scroll_offset", o.scroll_offset},
          {"timestamp", o.timestamp},
          {"screenshot_id", o.screenshot_id}};
}

Observation observation_from_json(const json& j) {
  Observation o;
  o.app_id = j.value("app_id", "");
  o.activity = j.at("activity").get<std::string>();
  o.params = j.value("params", Params{});
  o.ui_root = ui_node_from_json(j.at("ui_root"));
  for (const auto& t : j.at("render_layer")) {
    RenderText r;
    r.text = t.at("text").get<std::string>();
    r.bbox = rect_from_json(t.at("bbox"));
    r.origin = t.at("origin") == "overlay_only" ? TextOrigin::overlay_only : TextOrigin::structural;
    if (!t.at("backing_node").is_null()) r.backing_node = t.at("backing_node").get<std::string>();
    o.render_layer.push_back(std::move(r));
  }
  o.scroll_offset = j.value("scroll_offset", 0);
  o.timestamp = j.value("timestamp", VirtualMs{0});
  o.screenshot_id = j.value("screenshot_id", "");
  return o;
}

std::string serialize_tree(const UiNode& root) { return to_json(root).dump(); }

}  // namespace edgeagent::sim
