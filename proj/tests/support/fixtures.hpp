#pragma once

#include <string>
#include <vector>

#include "edgeagent/host/fixture_json.hpp"
#include "edgeagent/sim/device.hpp"
#include "json.hpp"

namespace edgeagent::testing {

inline const char* kShopJson = R"({
  "app_id": "shop", "display_name": "Taobao", "home_activity": "Home", "domain": "ecommerce",
  "activities": [
    {"name": "Home", "nodes": [
      {"id": "title", "role": "text", "text": "Shop", "bounds": [0, 0, 1080, 160]},
      {"id": "search", "role": "button", "text": "Search", "bounds": [40, 200, 400, 120], "clickable": true,
       "on_tap": {"kind": "launch", "activity": "SearchResults", "extras": {"q": "Evian spray"}}},
      {"id": "ads", "role": "button", "text": "Offers", "bounds": [600, 200, 400, 120], "clickable": true,
       "on_tap": {"kind": "launch", "activity": "Ads"}}]},
    {"name": "SearchResults", "deeplinks": ["app://shop/search/{q}"],
     "nodes": [{"id": "header", "role": "text", "text": "Results for {q}", "bounds": [0, 0, 1080, 160]}],
     "list": {"id": "results", "bounds": [0, 200, 1080, 1600], "row_height": 400,
              "display_fields": ["title", "price", "sales"],
              "generate": {"count": 10, "fields": {"title": "Evian item {i}",
                           "price": {"min": 5, "max": 300, "decimals": 2},
                           "sales": {"min": 0, "max": 5000}}},
              "on_tap_item": {"kind": "launch", "activity": "Item", "extras": {"id": "{item.id}", "title": "{item.title}"}}}},
    {"name": "Item", "deeplinks": ["app://shop/item/{id}"],
     "nodes": [{"id": "title", "role": "text", "text": "Item {id}", "bounds": [0, 200, 1080, 200]}]},
    {"name": "Secret", "exported": false,
     "nodes": [{"id": "title", "role": "text", "text": "Members only", "bounds": [0, 200, 1080, 200]}]},
    {"name": "Ads",
     "nodes": [{"id": "banner", "role": "image", "content_desc": "promo banner", "bounds": [0, 0, 1080, 900]},
               {"id": "close", "role": "button", "resource_id": "shop:id/close", "bounds": [960, 20, 100, 100], "clickable": true,
                "on_tap": {"kind": "back"}}],
     "overlays": [{"text": "Claim Reward", "bbox": [300, 1000, 480, 160],
                   "on_tap": {"kind": "launch", "activity": "Reward"}}],
     "visual_truth": {"gift box": [100, 1300, 200, 200]}},
    {"name": "Reward", "nodes": [{"id": "title", "role": "text", "text": "Reward claimed", "bounds": [0, 200, 1080, 200]}]}
  ]})";

inline const char* kGalleryJson = R"({
  "app_id": "gallery", "display_name": "Gallery", "home_activity": "Picker",
  "activities": [
    {"name": "Picker",
     "nodes": [{"id": "done", "role": "button", "text": "Done", "bounds": [700, 1750, 300, 120], "clickable": true,
                "on_tap": {"kind": "launch", "activity": "Chosen", "extras": {"selected": "{selected}"}}}],
     "list": {"id": "tiles", "bounds": [0, 0, 1080, 1500], "row_height": 250, "selectable": true,
              "items": [{"id": "a", "title": "tile a"}, {"id": "b", "title": "tile b"}, {"id": "c", "title": "tile c"},
                        {"id": "d", "title": "tile d"}, {"id": "e", "title": "tile e"}]}},
    {"name": "Chosen", "nodes": [{"id": "t", "role": "text", "text": "Chosen {selected}", "bounds": [0, 0, 1080, 200]}]}
  ]})";

inline sim::SimApp shop_app() { return host::app_from_json(nlohmann::json::parse(kShopJson)); }
inline sim::SimApp gallery_app() { return host::app_from_json(nlohmann::json::parse(kGalleryJson)); }
inline std::vector<sim::SimApp> sample_apps() { return {shop_app(), gallery_app()}; }

inline sim::IntentMsg component_intent(const std::string& app, const std::string& activity,
                                       std::map<std::string, std::string> extras = {}) {
  sim::IntentMsg i;
  i.action = sim::kActionMain;
  i.component = sim::ComponentName{app, activity};
  i.extras = std::move(extras);
  return i;
}

inline sim::IntentMsg uri_intent(const std::string& uri) {
  sim::IntentMsg i;
  i.data_uri = uri;
  return i;
}

inline Point center_of(const sim::UiNode& root, const std::string& id) {
  const auto* n = sim::find_node(root, id);
  return n ? n->bounds.center() : Point{-1, -1};
}

}  // namespace edgeagent::testing
