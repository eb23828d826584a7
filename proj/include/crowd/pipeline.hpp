#pragma once

#include <optional>
#include <vector>

#include "crowd/activity.hpp"
#include "crowd/estimator.hpp"
#include "crowd/features.hpp"
#include "crowd/grouping.hpp"
#include "crowd/tracks.hpp"

namespace crowd {

struct PipelineConfig {
  EstimatorConfig estimator;
  GroupingConfig grouping;
  ActivityBands bands;
  double displacement_tol = 1e-9;
  int forest_trees = 100;
  int forest_m = 4;
  int stride = 10;  // frames between evaluation instants

  ActivityConfig activity() const;
  FeatureConfig features() const;
  void validate() const;
};

// Frames first-1 + j*stride (j >= 1) that fit a full window.
std::vector<FrameId> evaluation_instants(const TrackSet& tracks, int L, int stride);

struct InstantResult {
  FrameId frame = 0;
  GroupPartition partition;
  std::vector<GroupActivity> groups;
  std::vector<AtomicActivity> atomic;
  CrowdFeatures features;
  std::vector<AgentId> excluded;
};

// Stateful sweep over evaluation instants: scene estimation chains the
// temporal-smoothness reference from the previous instant.
class Analyzer {
 public:
  explicit Analyzer(PipelineConfig config);
  InstantResult run_instant(const TrackSet& tracks, FrameId frame);
  const PipelineConfig& config() const { return config_; }

 private:
  PipelineConfig config_;
  std::optional<SceneModel> prev_;
};

std::vector<InstantResult> analyze_tracks(const TrackSet& tracks, const PipelineConfig& config);

}  // namespace crowd
