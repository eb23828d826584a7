#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "crowd/dynamics.hpp"
#include "crowd/forest.hpp"
#include "crowd/grouping.hpp"
#include "crowd/synthesis.hpp"

namespace crowd {

nlohmann::json model_to_json(const InteractionModel& model);
InteractionModel model_from_json(const nlohmann::json& j);

nlohmann::json partition_to_json(const GroupPartition& partition);
GroupPartition partition_from_json(const nlohmann::json& j);

// Per-frame activity document: {frame, groups: [{members, mu_x, mu_y, label}],
// atomic: [{agent, label}]}.
nlohmann::json activity_to_json(FrameId frame, const std::vector<GroupActivity>& groups,
                                const std::vector<AtomicActivity>& atomic);

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

// Ground-truth sidecar written next to synthesized tracks.
nlohmann::json truth_to_json(const LabeledScene& scene);
void truth_from_json(const nlohmann::json& j, GroupPartition& partition,
                     std::vector<ActivityLabel>& activities);

nlohmann::json forest_to_json(const Forest& forest);
Forest forest_from_json(const nlohmann::json& j);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace crowd
