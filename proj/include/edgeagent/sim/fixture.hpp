#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgeagent/sim/intent.hpp"
#include "edgeagent/sim/ui.hpp"

namespace edgeagent::sim {

/// What tapping a node does. Templates may reference page params as
/// `{name}` and, for list rows, item fields as `{item.field}`.
struct TapEffect {
  enum class Kind { launch, back, set_params, toggle_select };

  Kind kind = Kind::launch;
  std::string app;  // empty: same app
  std::string activity;
  std::string action = kActionView;
  std::string data_uri;
  std::map<std::string, std::string> extras;
  std::map<std::string, std::string> set;
  std::string item_id;  // toggle_select target
};

struct NodeSpec {
  std::string id;
  Role role = Role::text;
  std::string text;
  std::string content_desc;
  std::string resource_id;
  Rect bounds;
  bool clickable = false;
  bool scrollable = false;
  std::optional<TapEffect> on_tap;
  std::vector<NodeSpec> children;
};

/// Text drawn on screen that the accessibility tree does not expose.
struct OverlaySpec {
  std::string text;
  Rect bbox;
  std::optional<TapEffect> on_tap;
};

using ItemRecord = std::map<std::string, std::string>;

/// Either a text template (with `{i}` for the 1-based index) or a seeded
/// numeric range rendered with a fixed number of decimals.
struct FieldGen {
  std::string tmpl;
  bool numeric = false;
  std::int64_t min = 0;
  std::int64_t max = 0;
  int decimals = 0;
};

struct ItemGenerator {
  int count = 0;
  std::map<std::string, FieldGen> fields;
};

struct ListSpec {
  std::string id = "list";
  Rect bounds;
  int row_height = 100;
  std::vector<ItemRecord> items;
  std::optional<ItemGenerator> generate;
  std::string source_folder;  // template; items become the folder's files
  std::vector<std::string> display_fields;
  std::optional<TapEffect> on_tap_item;
  bool selectable = false;
};

struct ActivitySpec {
  std::string name;
  bool exported = true;
  std::vector<std::string> deeplinks;
  std::vector<NodeSpec> nodes;
  std::vector<OverlaySpec> overlays;
  std::optional<ListSpec> list;
  /// Ground-truth boxes for the visual grounding stub, keyed by query text.
  std::map<std::string, Rect> visual_truth;
};

struct SimApp {
  std::string app_id;
  std::string display_name;
  std::vector<ActivitySpec> activities;
  std::string home_activity;
  std::string domain;  // extraction schema hint ("ecommerce", "local_service")

  const ActivitySpec* find(std::string_view activity) const;
  ActivitySpec* find(std::string_view activity);
};

/// Throws Error(InvalidArgument) when the fixture breaks an invariant.
void validate(const SimApp& app);

using FolderMap = std::map<std::string, std::vector<std::string>>;

/// A materialized page. Everything above `effects` is observable.
struct Page {
  std::string app_id;
  std::string activity;
  Params params;
  UiNode ui_root;
  std::vector<RenderText> render_layer;
  int scroll_offset = 0;
  std::optional<std::vector<ItemRecord>> items;

  std::map<std::string, TapEffect> effects;
  std::vector<std::pair<Rect, TapEffect>> overlay_effects;
  std::string list_id;
  int visible_rows = 0;
  int max_scroll = 0;
  std::map<std::string, Rect> visual_truth;

  bool scrollable() const { return !list_id.empty(); }
  /// Items currently inside the list viewport.
  std::vector<ItemRecord> visible_items() const;
};

/// The page model: a pure function of its arguments.
Page build_page(const SimApp& app, const ActivitySpec& activity, const Params& params,
                int scroll_offset, std::uint64_t seed, const FolderMap& folders);

/// Ids of selected list items, stored in the "selected" param.
std::vector<std::string> selected_ids(const Params& params);

}  // namespace edgeagent::sim
