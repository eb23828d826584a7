#pragma once

#include <array>
#include <vector>

#include "crowd/activity.hpp"
#include "crowd/grouping.hpp"

namespace crowd {

// Mutual information normalized by the arithmetic mean of the entropies.
// Defined as 1 when both partitions are a single cluster.
double nmi(const GroupPartition& a, const GroupPartition& b);

// Fraction of agents in their predicted cluster's best-matching true cluster.
// Not symmetric: all-singleton predictions score 1.
double purity(const GroupPartition& pred, const GroupPartition& truth);

// Fraction of agent pairs on which the partitions agree.
double rand_index(const GroupPartition& a, const GroupPartition& b);

// Confusion over {Stationary, Approaching, Walking, Splitting}; rows = truth.
struct ActivityScore {
  std::array<std::array<int, 4>, 4> confusion{};
  std::array<double, 4> per_class{};  // NaN for classes absent from the truth
  double accuracy = 0;
  int total = 0;
};

int activity_class_index(ActivityLabel label);  // rejects Stopping
ActivityScore score_activities(const std::vector<ActivityLabel>& pred,
                               const std::vector<ActivityLabel>& truth);

}  // namespace crowd
