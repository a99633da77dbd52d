#include "edgeagent/host/fixture_json.hpp"

#include "edgeagent/error.hpp"

namespace edgeagent::host {

using nlohmann::json;

namespace {

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string(what) + ": " + e.what());
  }
}

std::map<std::string, std::string> string_map(const json& j, const char* key) {
  std::map<std::string, std::string> out;
  if (!j.contains(key)) return out;
  for (const auto& [k, v] : j.at(key).items()) out[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return out;
}

}  // namespace

sim::TapEffect tap_effect_from_json(const json& j) {
  return guarded("on_tap", [&] {
    sim::TapEffect e;
    std::string kind = j.value("kind", "launch");
    if (kind == "launch") {
      e.kind = sim::TapEffect::Kind::launch;
    } else if (kind == "back") {
      e.kind = sim::TapEffect::Kind::back;
    } else if (kind == "set_params") {
      e.kind = sim::TapEffect::Kind::set_params;
    } else if (kind == "toggle_select") {
      e.kind = sim::TapEffect::Kind::toggle_select;
    } else {
      throw Error(Errc::ParseError, "on_tap: unknown kind '" + kind + "'");
    }
    e.app = j.value("app", "");
    e.activity = j.value("activity", "");
    e.action = j.value("action", std::string(sim::kActionView));
    e.data_uri = j.value("data_uri", "");
    e.extras = string_map(j, "extras");
    e.set = string_map(j, "set");
    e.item_id = j.value("item_id", "");
    return e;
  });
}

sim::NodeSpec node_spec_from_json(const json& j) {
  return guarded("node", [&] {
    sim::NodeSpec n;
    n.id = j.at("id").get<std::string>();
    auto role = sim::parse_role(j.value("role", "text"));
    if (!role) throw Error(Errc::ParseError, "node " + n.id + ": unknown role");
    n.role = *role;
    n.text = j.value("text", "");
    n.content_desc = j.value("content_desc", "");
    n.resource_id = j.value("resource_id", "");
    n.bounds = sim::rect_from_json(j.at("bounds"));
    n.clickable = j.value("clickable", false);
    n.scrollable = j.value("scrollable", false);
    if (j.contains("on_tap")) n.on_tap = tap_effect_from_json(j.at("on_tap"));
    for (const auto& c : j.value("children", json::array())) n.children.push_back(node_spec_from_json(c));
    return n;
  });
}

sim::ListSpec list_spec_from_json(const json& j) {
  return guarded("list", [&] {
    sim::ListSpec l;
    l.id = j.value("id", "list");
    l.bounds = sim::rect_from_json(j.at("bounds"));
    l.row_height = j.value("row_height", 100);
    for (const auto& item : j.value("items", json::array())) {
      sim::ItemRecord r;
      for (const auto& [k, v] : item.items()) r[k] = v.is_string() ? v.get<std::string>() : v.dump();
      l.items.push_back(std::move(r));
    }
    if (j.contains("generate")) {
      sim::ItemGenerator g;
      const auto& gj = j.at("generate");
      g.count = gj.at("count").get<int>();
      for (const auto& [name, fj] : gj.at("fields").items()) {
        sim::FieldGen f;
        if (fj.is_string()) {
          f.tmpl = fj.get<std::string>();
        } else if (fj.contains("tmpl")) {
          f.tmpl = fj.at("tmpl").get<std::string>();
        } else {
          f.numeric = true;
          f.min = fj.at("min").get<std::int64_t>();
          f.max = fj.at("max").get<std::int64_t>();
          f.decimals = fj.value("decimals", 0);
        }
        g.fields[name] = f;
      }
      l.generate = g;
    }
    l.source_folder = j.value("source_folder", "");
    l.display_fields = j.value("display_fields", std::vector<std::string>{});
    if (j.contains("on_tap_item")) l.on_tap_item = tap_effect_from_json(j.at("on_tap_item"));
    l.selectable = j.value("selectable", false);
    return l;
  });
}

sim::ActivitySpec activity_from_json(const json& j) {
  return guarded("activity", [&] {
    sim::ActivitySpec a;
    a.name = j.at("name").get<std::string>();
    a.exported = j.value("exported", true);
    a.deeplinks = j.value("deeplinks", std::vector<std::string>{});
    for (const auto& n : j.value("nodes", json::array())) a.nodes.push_back(node_spec_from_json(n));
    for (const auto& o : j.value("overlays", json::array())) {
      sim::OverlaySpec ov;
      ov.text = o.at("text").get<std::string>();
      ov.bbox = sim::rect_from_json(o.at("bbox"));
      if (o.contains("on_tap")) ov.on_tap = tap_effect_from_json(o.at("on_tap"));
      a.overlays.push_back(std::move(ov));
    }
    if (j.contains("list")) a.list = list_spec_from_json(j.at("list"));
    if (j.contains("visual_truth"))
      for (const auto& [q, r] : j.at("visual_truth").items()) a.visual_truth[q] = sim::rect_from_json(r);
    return a;
  });
}

sim::SimApp app_from_json(const json& j) {
  return guarded("app", [&] {
    sim::SimApp app;
    app.app_id = j.at("app_id").get<std::string>();
    app.display_name = j.value("display_name", app.app_id);
    for (const auto& a : j.at("activities")) app.activities.push_back(activity_from_json(a));
    app.home_activity = j.value("home_activity", app.activities.empty() ? "" : app.activities.front().name);
    app.domain = j.value("domain", "");
    return app;
  });
}

sim::MediaAsset media_from_json(const json& j) {
  return guarded("media", [&] {
    sim::MediaAsset a;
    a.asset_id = j.at("asset_id").get<std::int64_t>();
    a.filename = j.at("filename").get<std::string>();
    a.folder = j.value("folder", "DCIM/Camera");
    a.captured_at = j.value("captured_at", VirtualMs{0});
    a.width = j.value("width", 4032);
    a.height = j.value("height", 3024);
    if (j.contains("truth")) {
      const auto& t = j.at("truth");
      a.truth.objects = t.value("objects", std::vector<std::string>{});
      a.truth.scene = t.value("scene", "");
      a.truth.event = t.value("event", "");
    }
    return a;
  });
}

json to_json(const sim::MediaAsset& a) {
  return {{"asset_id", a.asset_id},
          {"filename", a.filename},
          {"folder", a.folder},
          {"captured_at", a.captured_at},
          {"width", a.width},
          {"height", a.height},
          {"truth", {{"objects", a.truth.objects}, {"scene", a.truth.scene}, {"event", a.truth.event}}}};
}

perception::SceneDescriptor scene_from_json(const json& j) {
  return guarded("scene", [&] {
    perception::SceneDescriptor d;
    d.objects = j.value("objects", std::vector<std::string>{});
    d.scene = j.value("scene", "");
    d.event = j.value("event", "");
    return d;
  });
}

json to_json(const perception::SceneDescriptor& d) {
  return {{"objects", d.objects}, {"scene", d.scene}, {"event", d.event}};
}

perception::Frame frame_from_json(const json& j) {
  return guarded("frame", [&] {
    perception::Frame f;
    f.frame_id = j.at("frame_id").get<std::int64_t>();
    f.timestamp = j.at("timestamp").get<VirtualMs>();
    std::string src = j.value("source", "camera");
    if (src == "camera") {
      f.source = perception::FrameSource::camera;
      f.scene = scene_from_json(j.value("scene", json::object()));
    } else if (src == "screen") {
      f.source = perception::FrameSource::screen;
      f.scene = j.at("screenshot_id").get<std::string>();
    } else {
      throw Error(Errc::ParseError, "frame: unknown source '" + src + "'");
    }
    return f;
  });
}

SpeechSegment segment_from_json(const json& j, Channel channel) {
  return guarded("segment", [&] {
    return SpeechSegment{j.at("text").get<std::string>(), j.at("t_start").get<VirtualMs>(),
                         j.at("t_end").get<VirtualMs>(), channel};
  });
}

std::vector<SpeechSegment> segments_from_json(const json& j, Channel channel) {
  std::vector<SpeechSegment> out;
  for (const auto& s : j) out.push_back(segment_from_json(s, channel));
  return out;
}

std::optional<TriggerSource> parse_source(std::string_view s) {
  for (auto src : {TriggerSource::ui, TriggerSource::floating_widget, TriggerSource::microphone,
                   TriggerSource::schedule, TriggerSource::external_gateway})
    if (s == source_name(src)) return src;
  return std::nullopt;
}

clone::LaunchDescriptor descriptor_from_json(const json& j) {
  return guarded("entry", [&] {
    clone::LaunchDescriptor d;
    d.action = j.value("action", std::string(sim::kActionView));
    if (j.contains("data_uri") && !j.at("data_uri").is_null()) d.data_uri = j.at("data_uri").get<std::string>();
    auto comp = sim::ComponentName::parse(j.at("component").get<std::string>());
    if (!comp) throw Error(Errc::ParseError, "entry: component must be app/activity");
    d.component = *comp;
    d.extras = string_map(j, "extras");
    d.capture_method =
        j.value("capture_method", "keyword_filter") == "full_parse" ? clone::CaptureMethod::full_parse
                                                                     : clone::CaptureMethod::keyword_filter;
    return d;
  });
}

json to_json(const clone::LaunchDescriptor& d) {
  json j = {{"action", d.action},
            {"component", d.component.flat()},
            {"extras", d.extras},
            {"capture_method", clone::capture_method_name(d.capture_method)}};
  j["data_uri"] = d.data_uri ? json(*d.data_uri) : json(nullptr);
  return j;
}

clone::SkillCard skill_from_json(const json& j) {
  return guarded("skill", [&] {
    clone::SkillCard c;
    c.name = j.at("name").get<std::string>();
    c.description = j.value("description", c.name);
    c.triggers = j.value("triggers", std::vector<std::string>{});
    c.entry = descriptor_from_json(j.at("entry"));
    c.target_app = j.value("target_app", c.entry.component.app_id);
    if (c.target_app != c.entry.component.app_id)
      throw Error(Errc::ParseError, "skill " + c.name + ": entry must belong to target_app");
    c.trajectory_ref = j.value("trajectory_ref", "");
    c.parameters = j.value("parameters", std::vector<std::string>{});
    c.created_at = j.value("created_at", std::int64_t{0});
    return c;
  });
}

json to_json(const clone::SkillCard& c) {
  return {{"name", c.name},
          {"description", c.description},
          {"triggers", c.triggers},
          {"target_app", c.target_app},
          {"entry", to_json(c.entry)},
          {"trajectory_ref", c.trajectory_ref},
          {"parameters", c.parameters},
          {"created_at", c.created_at}};
}

json to_json(const clone::Bookmark& b) {
  return {{"name", b.name},
          {"descriptor", to_json(b.descriptor)},
          {"signature", clone::to_json(b.signature)},
          {"summary", b.summary},
          {"created_at", b.created_at}};
}

json to_json(const clone::ReplayOutcome& o) {
  json attempts = json::array();
  for (const auto& a : o.attempts)
    attempts.push_back({{"tier", clone::tier_name(a.tier)}, {"success", a.success}, {"detail", a.detail}});
  return {{"tier_used", clone::tier_name(o.tier_used)},
          {"app_id", o.page.app_id},
          {"activity", o.page.activity},
          {"attempts", attempts}};
}

json to_json(const memory::MemoryEntry& e) {
  return {{"filename", e.filename},
          {"captured_at", e.captured_at},
          {"kind", e.kind == memory::SummaryKind::model ? "model" : "metadata_fallback"},
          {"objects", e.objects},
          {"scene", e.scene},
          {"event", e.event},
          {"text", e.free_text}};
}

json to_json(const memory::MemoryFile& f) {
  json entries = json::array();
  for (const auto& e : f.entries) entries.push_back(to_json(e));
  return {{"cursor", f.cursor}, {"entries", entries}};
}

}  // namespace edgeagent::host
