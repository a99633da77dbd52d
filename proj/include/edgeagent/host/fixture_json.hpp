#pragma once

#include "edgeagent/clone/clone.hpp"
#include "edgeagent/memory/gallery.hpp"
#include "edgeagent/perception/frame_ring.hpp"
#include "edgeagent/sim/device.hpp"
#include "json.hpp"

// JSON readers for the fixture and scenario vocabulary. All throw
// Error(ParseError) with the offending path on malformed input.
namespace edgeagent::host {

sim::TapEffect tap_effect_from_json(const nlohmann::json& j);
sim::NodeSpec node_spec_from_json(const nlohmann::json& j);
sim::ListSpec list_spec_from_json(const nlohmann::json& j);
sim::ActivitySpec activity_from_json(const nlohmann::json& j);
sim::SimApp app_from_json(const nlohmann::json& j);

sim::MediaAsset media_from_json(const nlohmann::json& j);
nlohmann::json to_json(const sim::MediaAsset& a);

perception::SceneDescriptor scene_from_json(const nlohmann::json& j);
nlohmann::json to_json(const perception::SceneDescriptor& d);
perception::Frame frame_from_json(const nlohmann::json& j);

SpeechSegment segment_from_json(const nlohmann::json& j, Channel channel = Channel::mic);
std::vector<SpeechSegment> segments_from_json(const nlohmann::json& j, Channel channel = Channel::mic);

std::optional<TriggerSource> parse_source(std::string_view s);

clone::LaunchDescriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::json to_json(const clone::LaunchDescriptor& d);
clone::SkillCard skill_from_json(const nlohmann::json& j);
nlohmann::json to_json(const clone::SkillCard& c);
nlohmann::json to_json(const clone::Bookmark& b);
nlohmann::json to_json(const clone::ReplayOutcome& o);
nlohmann::json to_json(const memory::MemoryEntry& e);
nlohmann::json to_json(const memory::MemoryFile& f);

}  // namespace edgeagent::host
