#include "edgeagent/clone/clone.hpp"

namespace edgeagent::clone {

const char* tier_name(ReplayTier t) {
  switch (t) {
    case ReplayTier::full_intent: return "full_intent";
    case ReplayTier::deeplink: return "deeplink";
    case ReplayTier::bare_component: return "bare_component";
    case ReplayTier::task_stack_restore: return "task_stack_restore";
  }
  return "?";
}

namespace {

struct TierResult {
  std::optional<sim::Page> page;
  std::string detail;
};

TierResult from_launch(const sim::LaunchResult& r) {
  if (r.error) return {std::nullopt, errc_name(*r.error)};
  return {r.page, "launched"};
}

TierResult run_tier(ReplayTier tier, const LaunchDescriptor& d, sim::Device& device) {
  switch (tier) {
    case ReplayTier::full_intent:
      return from_launch(device.launch_intent(to_intent(d), false));
    case ReplayTier::deeplink: {
      if (!d.data_uri) return {std::nullopt, "no data uri"};
      sim::IntentMsg m;
      m.action = d.action;
      m.data_uri = d.data_uri;
      return from_launch(device.launch_intent(m, false));
    }
    case ReplayTier::bare_component: {
      sim::IntentMsg m;
      m.action = sim::kActionMain;
      m.component = d.component;
      return from_launch(device.launch_intent(m, false));
    }
    case ReplayTier::task_stack_restore: {
      auto page = device.restore_task(d.component.app_id);
      if (!page) return {std::nullopt, "no task stack"};
      return {page, "restored"};
    }
  }
  return {std::nullopt, "unknown tier"};
}

}  // namespace

ReplayOutcome replay(const Bookmark& bookmark, sim::Device& device) {
  static constexpr ReplayTier kTiers[] = {ReplayTier::full_intent, ReplayTier::deeplink,
                                          ReplayTier::bare_component, ReplayTier::task_stack_restore};
  std::vector<ReplayAttempt> attempts;
  for (ReplayTier tier : kTiers) {
    sim::DeviceState saved = device.state();
    TierResult r;
    try {
      r = run_tier(tier, bookmark.descriptor, device);
    } catch (const Error& e) {
      r = {std::nullopt, e.what()};
    }
    if (r.page && signature_validates(bookmark.signature, *r.page)) {
      attempts.push_back({tier, true, r.detail});
      return {tier, *r.page, std::move(attempts)};
    }
    if (r.page) r.detail = "signature mismatch on " + r.page->activity;
    device.restore(std::move(saved));
    attempts.push_back({tier, false, r.detail});
  }
  std::string log;
  for (const auto& a : attempts) log += std::string(log.empty() ? "" : "; ") + tier_name(a.tier) + ": " + a.detail;
  throw Error(Errc::AllTiersFailed, bookmark.name + " (" + log + ")");
}

}  // namespace edgeagent::clone
