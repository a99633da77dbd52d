#include "edgeagent/sim/device.hpp"

#include <algorithm>
#include <set>

#include "edgeagent/error.hpp"
#include "edgeagent/sim/dump.hpp"
#include "edgeagent/text.hpp"

namespace edgeagent::sim {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Gesture / action serialization

json to_json(const Gesture& g) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Tap>) {
          return {{"tap", {v.point.x, v.point.y}}};
        } else if constexpr (std::is_same_v<T, MultiTap>) {
          json pts = json::array();
          for (auto p : v.points) pts.push_back({p.x, p.y});
          return {{"multi_tap", pts}};
        } else if constexpr (std::is_same_v<T, Scroll>) {
          return {{"scroll", {{"direction", v.direction == ScrollDirection::down ? "down" : "up"},
                              {"rows", v.rows}}}};
        } else if constexpr (std::is_same_v<T, TypeText>) {
          return {{"type_text", {{"node_id", v.node_id}, {"text", v.text}}}};
        } else {
          return {{"back", true}};
        }
      },
      g);
}

Gesture gesture_from_json(const json& j) {
  auto point = [](const json& p) {
    if (!p.is_array() || p.size() != 2) throw Error(Errc::ParseError, "point must be [x, y]");
    return Point{p[0].get<int>(), p[1].get<int>()};
  };
  if (j.contains("tap")) return Tap{point(j["tap"])};
  if (j.contains("multi_tap")) {
    MultiTap m;
    for (const auto& p : j["multi_tap"]) m.points.push_back(point(p));
    return m;
  }
  if (j.contains("scroll")) {
    const auto& s = j["scroll"];
    auto dir = s.value("direction", "down");
    if (dir != "down" && dir != "up") throw Error(Errc::ParseError, "scroll direction must be up|down");
    return Scroll{dir == "down" ? ScrollDirection::down : ScrollDirection::up, s.value("rows", 1)};
  }
  if (j.contains("type_text")) {
    return TypeText{j["type_text"].at("node_id").get<std::string>(), j["type_text"].at("text").get<std::string>()};
  }
  if (j.contains("back")) return Back{};
  throw Error(Errc::ParseError, "unknown gesture: " + j.dump());
}

std::string describe(const Gesture& g) { return to_json(g).dump(); }

json to_json(const DeviceAction& a) {
  if (const auto* g = std::get_if<Gesture>(&a)) return {{"gesture", to_json(*g)}};
  return {{"intent", to_json(std::get<IntentMsg>(a))}};
}

DeviceAction action_from_json(const json& j) {
  if (j.contains("gesture")) return gesture_from_json(j["gesture"]);
  if (j.contains("intent")) return intent_from_json(j["intent"]);
  throw Error(Errc::ParseError, "action needs gesture or intent");
}

// ---------------------------------------------------------------------------
// Device

Device::Device(std::vector<SimApp> apps, std::uint64_t seed) {
  std::set<std::string> ids;
  for (const auto& a : apps) {
    validate(a);
    if (!ids.insert(a.app_id).second) throw Error(Errc::InvalidArgument, "duplicate app_id " + a.app_id);
  }
  state_.installed = std::move(apps);
  state_.seed = seed;
}

const SimApp* Device::find_app(std::string_view app_id) const {
  for (const auto& a : state_.installed)
    if (a.app_id == app_id) return &a;
  return nullptr;
}

Page Device::build(const std::string& app_id, const StackEntry& e) const {
  const SimApp* app = find_app(app_id);
  return build_page(*app, *app->find(e.activity), e.params, e.scroll_offset, state_.seed, state_.folders);
}

StackEntry* Device::top_entry() {
  if (!state_.foreground_app) return nullptr;
  auto& stack = state_.task_stacks[*state_.foreground_app];
  return stack.empty() ? nullptr : &stack.back();
}

std::optional<Page> Device::foreground_page() const {
  if (!state_.foreground_app) return std::nullopt;
  auto it = state_.task_stacks.find(*state_.foreground_app);
  if (it == state_.task_stacks.end() || it->second.empty()) return std::nullopt;
  return build(*state_.foreground_app, it->second.back());
}

std::optional<Foreground> Device::foreground() const {
  if (!state_.foreground_app) return std::nullopt;
  auto it = state_.task_stacks.find(*state_.foreground_app);
  if (it == state_.task_stacks.end() || it->second.empty()) return std::nullopt;
  return Foreground{*state_.foreground_app, it->second.back().activity, it->second.back().params};
}

const std::vector<StackEntry>* Device::task_stack(const std::string& app_id) const {
  auto it = state_.task_stacks.find(app_id);
  return it == state_.task_stacks.end() ? nullptr : &it->second;
}

void Device::notify(const DeviceAction& a, const std::optional<Page>& before) {
  for (auto* o : observers_) o->on_action(*this, a, before);
}

void Device::add_observer(DeviceObserver* o) { observers_.push_back(o); }

void Device::remove_observer(DeviceObserver* o) {
  observers_.erase(std::remove(observers_.begin(), observers_.end(), o), observers_.end());
}

namespace {

LaunchResult failure(Errc e) { return {std::nullopt, e}; }

}  // namespace

std::optional<std::pair<const SimApp*, const ActivitySpec*>> Device::resolve_deeplink(
    const std::string& uri, Params& slots) const {
  // First match wins, install order then declaration order.
  for (const auto& app : state_.installed) {
    for (const auto& act : app.activities) {
      for (const auto& p : act.deeplinks) {
        if (auto bound = UriTemplate(p).match(uri)) {
          slots = std::move(*bound);
          return std::make_pair(&app, &act);
        }
      }
    }
  }
  return std::nullopt;
}

LaunchResult Device::launch_intent(const IntentMsg& intent, bool privileged) {
  return launch(intent, privileged, true);
}

LaunchResult Device::launch(const IntentMsg& intent, bool privileged, bool notify_observers) {
  auto before = notify_observers ? foreground_page() : std::nullopt;
  const SimApp* app = nullptr;
  const ActivitySpec* activity = nullptr;
  Params slots;
  if (intent.action.empty() || (intent.data_uri && intent.data_uri->empty()))
    return failure(Errc::InvalidArgument);
  if (intent.component) {
    app = find_app(intent.component->app_id);
    activity = app ? app->find(intent.component->activity) : nullptr;
    if (!activity) return failure(Errc::UnknownComponent);
    if (!activity->exported && !privileged) return failure(Errc::NotExported);
    if (intent.data_uri) {
      for (const auto& p : activity->deeplinks) {
        if (auto bound = UriTemplate(p).match(*intent.data_uri)) {
          slots = std::move(*bound);
          break;
        }
      }
    }
  } else if (intent.data_uri) {
    auto hit = resolve_deeplink(*intent.data_uri, slots);
    if (!hit) return failure(Errc::NoMatch);
    std::tie(app, activity) = *hit;
  } else {
    return failure(Errc::NoMatch);
  }

  StackEntry entry;
  entry.activity = activity->name;
  entry.params = std::move(slots);
  for (const auto& [k, v] : intent.extras) entry.params[k] = v;
  entry.intent = intent;
  entry.intent.component = ComponentName{app->app_id, activity->name};

  const std::string app_id = app->app_id;
  auto& stack = state_.task_stacks[app_id];
  if (stack.empty()) state_.task_ids[app_id] = state_.next_task_id++;
  stack.push_back(entry);
  state_.foreground_app = app_id;
  state_.launch_log.push_back(entry.intent);

  Page page = build(app_id, stack.back());
  if (notify_observers) notify(intent, before);
  return {std::move(page), std::nullopt};
}

std::optional<Page> Device::apply_effect(const Page& page, const TapEffect& effect) {
  switch (effect.kind) {
    case TapEffect::Kind::launch: {
      IntentMsg intent;
      intent.action = effect.action;
      if (!effect.data_uri.empty()) intent.data_uri = effect.data_uri;
      std::string target_app = effect.app.empty() ? page.app_id : effect.app;
      if (!effect.activity.empty()) intent.component = ComponentName{target_app, effect.activity};
      intent.extras = effect.extras;
      // In-app navigation may reach unexported activities.
      return launch(intent, target_app == page.app_id, false).page;
    }
    case TapEffect::Kind::back: {
      auto& stack = state_.task_stacks[page.app_id];
      stack.pop_back();
      if (stack.empty()) {
        state_.foreground_app.reset();
        state_.task_ids.erase(page.app_id);
        return std::nullopt;
      }
      return build(page.app_id, stack.back());
    }
    case TapEffect::Kind::set_params: {
      auto* top = top_entry();
      for (const auto& [k, v] : effect.set) top->params[k] = v;
      return build(page.app_id, *top);
    }
    case TapEffect::Kind::toggle_select: {
      auto* top = top_entry();
      auto ids = selected_ids(top->params);
      auto it = std::find(ids.begin(), ids.end(), effect.item_id);
      if (it == ids.end()) {
        ids.push_back(effect.item_id);
      } else {
        ids.erase(it);
      }
      std::sort(ids.begin(), ids.end());
      top->params["selected"] = text::join(ids, ",");
      return build(page.app_id, *top);
    }
  }
  return std::nullopt;
}

namespace {

void hit_path(const UiNode& n, Point p, std::vector<const UiNode*>& path) {
  if (!n.bounds.contains(p)) return;
  path.push_back(&n);
  for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
    if (it->bounds.contains(p)) {
      hit_path(*it, p, path);
      return;
    }
  }
}

}  // namespace

TransitionResult Device::tap(Point p, bool notify_single) {
  auto before = foreground_page();
  const Page& page = *before;
  std::optional<TapEffect> effect;
  for (auto it = page.overlay_effects.rbegin(); it != page.overlay_effects.rend(); ++it) {
    if (it->first.contains(p)) {
      effect = it->second;
      break;
    }
  }
  if (!effect) {
    std::vector<const UiNode*> path;
    hit_path(page.ui_root, p, path);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      auto e = page.effects.find((*it)->node_id);
      if ((*it)->clickable && e != page.effects.end()) {
        effect = e->second;
        break;
      }
    }
  }
  if (!effect) return {false, before};
  auto after = apply_effect(page, *effect);
  if (notify_single) notify(Gesture{Tap{p}}, before);
  return {true, after};
}

TransitionResult Device::apply_gesture(const Gesture& g) {
  if (!foreground()) throw Error(Errc::NoForeground, "gesture with no foreground app");
  auto check = [](Point p) {
    if (!kScreenRect.contains(p))
      throw Error(Errc::OutOfBounds, "point (" + std::to_string(p.x) + "," + std::to_string(p.y) + ")");
  };

  if (const auto* t = std::get_if<Tap>(&g)) {
    check(t->point);
    return tap(t->point, true);
  }
  if (const auto* m = std::get_if<MultiTap>(&g)) {
    for (auto p : m->points) check(p);
    auto before = foreground_page();
    DeviceState saved = state_;
    bool changed = false;
    try {
      for (auto p : m->points) {
        if (!foreground()) break;
        changed = tap(p, false).changed || changed;
      }
    } catch (...) {
      state_ = std::move(saved);
      throw;
    }
    if (changed) notify(g, before);
    return {changed, foreground_page()};
  }
  if (const auto* s = std::get_if<Scroll>(&g)) {
    auto page = foreground_page();
    if (!page->scrollable()) return {false, page};
    int delta = s->direction == ScrollDirection::down ? s->rows : -s->rows;
    int next = std::clamp(page->scroll_offset + delta, 0, page->max_scroll);
    if (next == page->scroll_offset) return {false, page};
    top_entry()->scroll_offset = next;
    notify(g, page);
    return {true, foreground_page()};
  }
  if (const auto* t = std::get_if<TypeText>(&g)) {
    auto page = foreground_page();
    const UiNode* node = find_node(page->ui_root, t->node_id);
    if (!node || node->role != Role::input)
      throw Error(Errc::InvalidArgument, "no input node " + t->node_id);
    top_entry()->params[t->node_id] = t->text;
    notify(g, page);
    return {true, foreground_page()};
  }
  // Back
  auto page = foreground_page();
  TapEffect back;
  back.kind = TapEffect::Kind::back;
  auto after = apply_effect(*page, back);
  notify(g, page);
  return {true, after};
}

std::string Device::screenshot_of(const Page& page) const {
  json layer = json::array();
  for (const auto& t : page.render_layer) layer.push_back(to_json(t));
  json key = {{"app", page.app_id}, {"activity", page.activity}, {"layer", layer},
              {"truth", json::object()}};
  for (const auto& [q, r] : page.visual_truth) key["truth"][q] = rect_json(r);
  std::string id = "shot-" + text::hex64(text::fnv1a64(key.dump()));
  captures_.try_emplace(id, ScreenCapture{page.render_layer, page.visual_truth});
  return id;
}

Observation Device::snapshot() const {
  auto page = foreground_page();
  if (!page) throw Error(Errc::NoForeground, "snapshot with no foreground app");
  Observation o;
  o.app_id = page->app_id;
  o.activity = page->activity;
  o.params = page->params;
  o.ui_root = page->ui_root;
  o.render_layer = page->render_layer;
  o.scroll_offset = page->scroll_offset;
  o.timestamp = state_.clock;
  o.screenshot_id = screenshot_of(*page);
  return o;
}

std::optional<ScreenCapture> Device::capture(const std::string& screenshot_id) const {
  auto it = captures_.find(screenshot_id);
  if (it == captures_.end()) return std::nullopt;
  return it->second;
}

std::string Device::dumpsys_activity() const {
  std::string out;
  for (const auto& app : state_.installed) {
    auto it = state_.task_stacks.find(app.app_id);
    if (it == state_.task_stacks.end() || it->second.empty()) continue;
    out += "TASK " + app.app_id + " id=" + std::to_string(state_.task_ids.at(app.app_id)) + "\n";
    for (const auto& e : it->second) {
      out += "  ACTIVITY " + app.app_id + "/" + e.activity + "\n";
      const auto& in = e.intent;
      out += "    intent={act=" + escape_dump_token(in.action);
      out += " dat=" + (in.data_uri ? escape_dump_token(*in.data_uri) : std::string("-"));
      out += " cmp=" + (in.component ? escape_dump_token(in.component->flat()) : std::string("-"));
      out += " extras={";
      bool first = true;
      for (const auto& [k, v] : in.extras) {
        if (!first) out += ',';
        first = false;
        out += escape_dump_extra(k) + "=" + escape_dump_extra(v);
      }
      out += "}}\n";
    }
  }
  return out;
}

std::string Device::add_alarm(AlarmSpec alarm) {
  if (alarm.repeat_every && *alarm.repeat_every <= 0)
    throw Error(Errc::InvalidArgument, "repeat_every must be positive");
  if (alarm.alarm_id.empty()) alarm.alarm_id = "alarm-" + std::to_string(state_.next_alarm_id++);
  state_.alarms.push_back(alarm);
  return alarm.alarm_id;
}

std::vector<TriggerEvent> Device::advance_clock(VirtualMs dt) {
  if (dt < 0) throw Error(Errc::InvalidArgument, "advance_clock needs dt >= 0");
  const VirtualMs until = state_.clock + dt;
  struct Fired {
    VirtualMs at;
    size_t alarm;
    TriggerEvent event;
  };
  std::vector<Fired> fired;
  std::vector<AlarmSpec> keep;
  for (size_t i = 0; i < state_.alarms.size(); ++i) {
    AlarmSpec a = state_.alarms[i];
    bool done = false;
    while (a.fire_at <= until) {
      TriggerEvent e = a.payload;
      e.timestamp = a.fire_at;
      fired.push_back({a.fire_at, i, std::move(e)});
      if (!a.repeat_every) {
        done = true;
        break;
      }
      a.fire_at += *a.repeat_every;
    }
    if (!done) keep.push_back(std::move(a));
  }
  state_.alarms = std::move(keep);
  state_.clock = until;
  std::stable_sort(fired.begin(), fired.end(), [](const Fired& x, const Fired& y) {
    return x.at != y.at ? x.at < y.at : x.alarm < y.alarm;
  });
  std::vector<TriggerEvent> out;
  for (auto& f : fired) out.push_back(std::move(f.event));
  return out;
}

void Device::add_media(MediaAsset asset) {
  if (!state_.media.empty()) {
    const auto& last = state_.media.back();
    if (asset.asset_id <= last.asset_id || asset.captured_at < last.captured_at)
      throw Error(Errc::InvalidArgument, "asset ids must increase with capture time");
  }
  if (find_media(asset.filename)) throw Error(Errc::InvalidArgument, "duplicate filename " + asset.filename);
  state_.media.push_back(std::move(asset));
}

bool Device::remove_media(std::string_view filename) {
  auto it = std::find_if(state_.media.begin(), state_.media.end(),
                         [&](const MediaAsset& m) { return m.filename == filename; });
  if (it == state_.media.end()) return false;
  state_.media.erase(it);
  return true;
}

const MediaAsset* Device::find_media(std::string_view filename) const {
  for (const auto& m : state_.media)
    if (m.filename == filename) return &m;
  return nullptr;
}

std::vector<MediaAsset> Device::media_list(std::int64_t since_id) const {
  std::vector<MediaAsset> out;
  for (const auto& m : state_.media)
    if (m.asset_id > since_id) out.push_back(m);
  return out;
}

void Device::write_folder(const std::string& path, std::vector<std::string> files) {
  state_.folders[path] = std::move(files);
}

std::vector<std::string> Device::folder(const std::string& path) const {
  auto it = state_.folders.find(path);
  return it == state_.folders.end() ? std::vector<std::string>{} : it->second;
}

void Device::set_playback(std::vector<SpeechSegment> segments) {
  std::stable_sort(segments.begin(), segments.end(),
                   [](const auto& a, const auto& b) { return a.t_start < b.t_start; });
  for (size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].t_start > segments[i].t_end)
      throw Error(Errc::InvalidArgument, "segment ends before it starts");
    if (i > 0 && segments[i].t_start < segments[i - 1].t_end)
      throw Error(Errc::OverlappingSegments, "playback segments overlap");
    segments[i].channel = Channel::playback;
  }
  state_.playback = std::move(segments);
}

std::vector<SpeechSegment> Device::capture_mic(std::vector<SpeechSegment> user) const {
  for (auto& s : user) s.channel = Channel::mic;
  for (const auto& p : state_.playback) {
    SpeechSegment echo = p;
    echo.channel = Channel::mic;
    user.push_back(std::move(echo));
  }
  std::stable_sort(user.begin(), user.end(), [](const auto& a, const auto& b) { return a.t_start < b.t_start; });
  return user;
}

std::optional<Page> Device::restore_task(const std::string& app_id) {
  auto it = state_.task_stacks.find(app_id);
  if (it == state_.task_stacks.end() || it->second.empty()) return std::nullopt;
  state_.foreground_app = app_id;
  return build(app_id, it->second.back());
}

void Device::set_exported(const std::string& app_id, const std::string& activity, bool exported) {
  for (auto& a : state_.installed) {
    if (a.app_id != app_id) continue;
    if (auto* act = a.find(activity)) {
      act->exported = exported;
      return;
    }
  }
  throw Error(Errc::UnknownComponent, app_id + "/" + activity);
}

void Device::set_deeplinks(const std::string& app_id, const std::string& activity,
                           std::vector<std::string> patterns) {
  for (const auto& p : patterns) (void)UriTemplate{p};
  for (auto& a : state_.installed) {
    if (a.app_id != app_id) continue;
    if (auto* act = a.find(activity)) {
      act->deeplinks = std::move(patterns);
      return;
    }
  }
  throw Error(Errc::UnknownComponent, app_id + "/" + activity);
}

void Device::restore(DeviceState s) { state_ = std::move(s); }

std::string Device::state_digest() const {
  json j;
  json apps = json::array();
  for (const auto& a : state_.installed) {
    json acts = json::array();
    for (const auto& act : a.activities)
      acts.push_back({{"name", act.name}, {"exported", act.exported}, {"deeplinks", act.deeplinks}});
    apps.push_back({{"app_id", a.app_id}, {"activities", acts}});
  }
  j["apps"] = apps;
  json stacks = json::object();
  for (const auto& [app, stack] : state_.task_stacks) {
    json entries = json::array();
    for (const auto& e : stack)
      entries.push_back({{"activity", e.activity}, {"params", e.params}, {"scroll", e.scroll_offset},
                         {"intent", to_json(e.intent)}});
    stacks[app] = entries;
  }
  j["stacks"] = stacks;
  j["task_ids"] = state_.task_ids;
  j["foreground"] = state_.foreground_app ? json(*state_.foreground_app) : json(nullptr);
  j["clock"] = state_.clock;
  json alarms = json::array();
  for (const auto& a : state_.alarms)
    alarms.push_back({{"id", a.alarm_id}, {"fire_at", a.fire_at}, {"repeat", a.repeat_every.value_or(0)}});
  j["alarms"] = alarms;
  json media = json::array();
  for (const auto& m : state_.media) media.push_back({m.asset_id, m.filename, m.folder});
  j["media"] = media;
  json playback = json::array();
  for (const auto& p : state_.playback) playback.push_back({p.text, p.t_start, p.t_end});
  j["playback"] = playback;
  j["folders"] = state_.folders;
  json log = json::array();
  for (const auto& i : state_.launch_log) log.push_back(to_json(i));
  j["launch_log"] = log;
  j["seed"] = state_.seed;
  return text::hex64(text::fnv1a64(j.dump()));
}

// ---------------------------------------------------------------------------
// DeviceCommandQueue

DeviceCommandQueue::DeviceCommandQueue(Device& device) : device_(device), worker_([this] { loop(); }) {}

DeviceCommandQueue::~DeviceCommandQueue() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void DeviceCommandQueue::loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return stop_ || !jobs_.empty(); });
      if (jobs_.empty()) return;
      job = std::move(jobs_.front());
      jobs_.pop_front();
    }
    job();
  }
}

}  // namespace edgeagent::sim
