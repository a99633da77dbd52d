#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgeagent/geometry.hpp"
#include "edgeagent/types.hpp"
#include "json.hpp"

namespace edgeagent::sim {

using Params = std::map<std::string, std::string>;

enum class Role { button, text, input, list, image, container };

const char* role_name(Role r);
std::optional<Role> parse_role(std::string_view s);

/// Structural (accessibility-tree) node.
struct UiNode {
  std::string node_id;
  Role role = Role::container;
  std::string text;
  std::string content_desc;
  std::string resource_id;
  Rect bounds;
  bool clickable = false;
  bool scrollable = false;
  std::vector<UiNode> children;

  friend bool operator==(const UiNode&, const UiNode&) = default;
};

enum class TextOrigin { structural, overlay_only };

/// A text as it appears on screen. Overlay-only texts have no structural node.
struct RenderText {
  std::string text;
  Rect bbox;
  TextOrigin origin = TextOrigin::structural;
  std::optional<std::string> backing_node;

  friend bool operator==(const RenderText&, const RenderText&) = default;
};

/// Everything the agent can see of the device at one instant.
struct Observation {
  std::string app_id;
  std::string activity;
  Params params;
  UiNode ui_root;
  std::vector<RenderText> render_layer;
  int scroll_offset = 0;
  VirtualMs timestamp = 0;
  std::string screenshot_id;
};

/// Preorder walk; `fn(node, parent_chain_clickable)`.
template <typename Fn>
void walk(const UiNode& node, Fn&& fn, bool ancestor_clickable = false) {
  fn(node, ancestor_clickable);
  for (const auto& c : node.children) walk(c, fn, ancestor_clickable || node.clickable);
}

const UiNode* find_node(const UiNode& root, std::string_view node_id);

nlohmann::json to_json(const UiNode& n);
nlohmann::json to_json(const RenderText& t);
nlohmann::json to_json(const Observation& o);
UiNode ui_node_from_json(const nlohmann::json& j);
Observation observation_from_json(const nlohmann::json& j);
nlohmann::json rect_json(const Rect& r);
Rect rect_from_json(const nlohmann::json& j);

/// Canonical serialization of the structural tree (sorted keys, compact).
std::string serialize_tree(const UiNode& root);

}  // namespace edgeagent::sim
