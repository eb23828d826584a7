#include "crowd/synthesis.hpp"

#include <cmath>

#include "crowd/rng.hpp"

namespace crowd {

const char* to_string(MotionPattern pattern) {
  switch (pattern) {
    case MotionPattern::Stationary: return "Stationary";
    case MotionPattern::Walking: return "Walking";
    case MotionPattern::Approaching: return "Approaching";
    case MotionPattern::Splitting: return "Splitting";
  }
  return "Stationary";
}

MotionPattern pattern_from_string(const std::string& name) {
  if (name == "Stationary") return MotionPattern::Stationary;
  if (name == "Walking") return MotionPattern::Walking;
  if (name == "Approaching") return MotionPattern::Approaching;
  if (name == "Splitting") return MotionPattern::Splitting;
  throw Error(Errc::Parse, "unknown motion pattern '" + name + "'");
}

void ScenarioSpec::validate() const {
  if (groups.empty()) throw Error(Errc::InvalidArgument, "scenario has no groups");
  if (frames < 2) throw Error(Errc::InvalidArgument, "scenario needs at least 2 frames");
  if (noise_sigma < 0) throw Error(Errc::InvalidArgument, "noise sigma must be non-negative");
  for (const auto& g : groups) {
    if (g.size < 1) throw Error(Errc::InvalidArgument, "group size must be at least 1");
    if (g.pattern == MotionPattern::Approaching && !(g.rate > 0 && g.rate < 1))
      throw Error(Errc::InvalidArgument, "approaching rate must be in (0,1)");
    if (g.pattern == MotionPattern::Splitting && !(g.rate > 1))
      throw Error(Errc::InvalidArgument, "splitting rate must exceed 1");
    if (g.spacing < 0) throw Error(Errc::InvalidArgument, "spacing must be non-negative");
  }
}

namespace {

Eigen::Vector2d member_offset(const GroupSpec& g, int member) {
  // Approaching keeps member 0 on the anchor (the shared target); the other
  // patterns center the formation on the anchor.
  double slot = g.pattern == MotionPattern::Approaching
                    ? static_cast<double>(member)
                    : static_cast<double>(member) - 0.5 * (g.size - 1);
  return {slot * g.spacing, 0.0};
}

ActivityLabel truth_label(const GroupSpec& g) {
  if (g.size == 1) {
    // atomic vocabulary for singletons
    switch (g.pattern) {
      case MotionPattern::Stationary: return ActivityLabel::Stationary;
      case MotionPattern::Walking: return ActivityLabel::Walking;
      case MotionPattern::Approaching: return ActivityLabel::Stopping;
      case MotionPattern::Splitting: return ActivityLabel::Walking;
    }
  }
  switch (g.pattern) {
    case MotionPattern::Stationary: return ActivityLabel::Stationary;
    case MotionPattern::Walking: return ActivityLabel::Walking;
    case MotionPattern::Approaching: return ActivityLabel::Approaching;
    case MotionPattern::Splitting: return ActivityLabel::Splitting;
  }
  return ActivityLabel::Stationary;
}

}  // namespace

LabeledScene generate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  std::vector<TrackPoint> points;
  std::vector<std::vector<AgentId>> truth_groups;
  std::vector<ActivityLabel> activities;

  AgentId next_id = 0;
  for (const auto& g : spec.groups) {
    std::vector<AgentId> members;
    for (int m = 0; m < g.size; ++m) {
      AgentId id = next_id++;
      members.push_back(id);
      Eigen::Vector2d offset = member_offset(g, m);
      for (int k = 0; k < spec.frames; ++k) {
        Eigen::Vector2d pos;
        switch (g.pattern) {
          case MotionPattern::Stationary:
            pos = g.anchor + offset;
            break;
          case MotionPattern::Walking:
            pos = g.anchor + offset + static_cast<double>(k) * g.velocity;
            break;
          case MotionPattern::Approaching:
          case MotionPattern::Splitting:
            pos = g.anchor + offset * std::pow(g.rate, k);
            break;
        }
        if (spec.noise_sigma > 0) {
          pos.x() += rng.normal(0.0, spec.noise_sigma);
          pos.y() += rng.normal(0.0, spec.noise_sigma);
        }
        points.push_back({k, id, pos.x(), pos.y()});
      }
    }
    truth_groups.push_back(std::move(members));
    activities.push_back(truth_label(g));
  }

  LabeledScene scene{TrackSet::from_points(points),
                     GroupPartition::from_groups(spec.frames - 1, truth_groups),
                     std::move(activities)};
  return scene;
}

}  // namespace crowd
