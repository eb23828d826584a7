#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "crowd/features.hpp"

namespace crowd {

struct TreeNode {
  int feature = -1;       // -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  int leaf_class = -1;
};

struct Tree {
  std::vector<TreeNode> nodes;
  int predict(const std::array<double, kFeatureCount>& x) const;
};

struct Forest {
  std::vector<Tree> trees;
  int m = 4;  // features sampled per split
  int class_count = kCrowdClassCount;
  uint64_t seed = 0;
  double oob_error = std::numeric_limits<double>::quiet_NaN();
  std::array<double, kFeatureCount> importance{};  // normalized to sum 1

  // per tree, per training sample: bootstrap multiplicity. Kept for
  // instrumentation; not serialized.
  std::vector<std::vector<int>> bootstrap_counts;

  bool trained() const { return !trees.empty(); }
};

// Bagged Gini trees grown to purity (or single-sample leaves); each split
// considers m features drawn without replacement. Fully deterministic for a
// fixed seed. Requires at least two classes.
Forest train_forest(const std::vector<CrowdFeatures>& data, int num_trees, int m, uint64_t seed);

// One tree over an explicit sample multiset (weight = multiplicity, zero
// excludes). Node statistics are multisets, so the result is independent of
// the sample order.
Tree train_single_tree(const std::vector<CrowdFeatures>& data, const std::vector<int>& weights,
                       int m, uint64_t seed);

struct ForestPrediction {
  int cls = -1;
  std::vector<int> votes;  // per class, sums to the tree count
};

ForestPrediction predict_forest(const Forest& forest, const CrowdFeatures& features);

// Mean decrease in Gini impurity per feature, normalized to sum 1.
std::array<double, kFeatureCount> feature_importance(const Forest& forest);

}  // namespace crowd
