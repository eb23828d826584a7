#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "crowd/dynamics.hpp"
#include "crowd/estimator.hpp"
#include "crowd/tracks.hpp"

namespace crowd {

// Agent -> group labels at one instant; labels are dense and 1-based, numbered
// by the smallest agent id each group contains.
struct GroupPartition {
  FrameId frame = 0;
  std::map<AgentId, int> labels;

  int group_count() const;
  std::vector<std::vector<AgentId>> groups() const;  // sorted members, by group id
  static GroupPartition from_groups(FrameId frame, const std::vector<std::vector<AgentId>>& groups);
};

struct GroupingConfig {
  double c = 0.1;             // relative distance threshold for linking
  double significance = 0.90; // eigenvalue modulus below which modes are dropped
  double cond_bound = 1e8;    // eigenvector conditioning bound (defective fallback)
};

// Per-agent coordinates assembled from the significant eigenvectors of A.
// A conjugate pair contributes two real coordinates (real and imaginary part
// of one member).
struct Embedding {
  std::vector<AgentId> agent_order;
  Eigen::MatrixXd points;  // N x dim, row i = z_i
  int significant = 0;     // r: eigenvalues at or above the threshold
  double threshold = 0.90;
};

Embedding embed(const InteractionModel& model, double threshold = 0.90, double cond_bound = 1e8);

// Links agents i, j when ||z_i - z_j|| <= c * min(|z_i|, |z_j|); two
// near-zero points compare against c directly. Groups are the connected
// components.
GroupPartition cluster(const Embedding& embedding, double c);

// Two agents share a merged group iff they share a group along both axes.
GroupPartition merge_axis_labels(const GroupPartition& zx, const GroupPartition& zy);

// Per-axis embed + cluster, axis merge, then a split of every group into the
// spatially connected components of the scene's neighbor graph.
GroupPartition detect_groups(const TrackSet& tracks, const SceneModel& scene,
                             const GroupingConfig& config);

}  // namespace crowd
