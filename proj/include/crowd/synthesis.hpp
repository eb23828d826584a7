#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "crowd/activity.hpp"
#include "crowd/grouping.hpp"
#include "crowd/tracks.hpp"

namespace crowd {

enum class MotionPattern { Stationary, Walking, Approaching, Splitting };

const char* to_string(MotionPattern pattern);
MotionPattern pattern_from_string(const std::string& name);

struct GroupSpec {
  int size = 2;
  MotionPattern pattern = MotionPattern::Walking;
  Eigen::Vector2d anchor{0, 0};
  Eigen::Vector2d velocity{0, 0};  // Walking only
  double rate = 0.8;               // Approaching in (0,1), Splitting > 1
  double spacing = 1.0;
};

struct ScenarioSpec {
  std::vector<GroupSpec> groups;
  int frames = 50;
  double noise_sigma = 0.0;
  uint64_t seed = 0;

  void validate() const;
};

struct LabeledScene {
  TrackSet tracks;
  GroupPartition partition;              // ground truth, constant over the clip
  std::vector<ActivityLabel> activities; // per group, 1-based group ids
};

// Noise-free member positions follow the pattern's closed-form mode exactly:
//   Stationary:  anchor + offset
//   Walking:     anchor + offset + k v
//   Approaching: anchor + offset rate^k   (member 0 sits at the anchor)
//   Splitting:   anchor + offset rate^k   (offsets centered on the anchor)
// then i.i.d. Gaussian noise is added per coordinate per frame.
LabeledScene generate(const ScenarioSpec& spec);

}  // namespace crowd
