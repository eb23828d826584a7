#include "crowd/forest.hpp"

#include <algorithm>
#include <cmath>

#include "crowd/rng.hpp"

namespace crowd {

int Tree::predict(const std::array<double, kFeatureCount>& x) const {
  if (nodes.empty()) throw Error(Errc::InvalidArgument, "empty tree");
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].leaf_class;
}

namespace {

struct Item {
  int sample;
  int weight;
};

double gini(const std::vector<long>& counts, long total) {
  if (total <= 0) return 0;
  double g = 1.0;
  for (long c : counts) {
    double p = static_cast<double>(c) / static_cast<double>(total);
    g -= p * p;
  }
  return g;
}

int majority(const std::vector<long>& counts) {
  int best = 0;
  for (std::size_t k = 1; k < counts.size(); ++k)
    if (counts[k] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  return best;  // ties resolve to the lowest class index
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::array<double, kFeatureCount>>& x,
              const std::vector<int>& y, int class_count, int m, Rng rng,
              std::array<double, kFeatureCount>& gain_acc)
      : x_(x), y_(y), class_count_(class_count), m_(m), rng_(rng), gains_(gain_acc) {}

  Tree build(const std::vector<Item>& items) {
    Tree tree;
    grow(items, tree);
    return tree;
  }

 private:
  int grow(const std::vector<Item>& items, Tree& tree) {
    std::vector<long> counts(static_cast<std::size_t>(class_count_), 0);
    long total = 0;
    for (const Item& it : items) {
      counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(it.sample)])] += it.weight;
      total += it.weight;
    }

    int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    long nonzero_classes = 0;
    for (long c : counts) nonzero_classes += c > 0 ? 1 : 0;
    if (nonzero_classes <= 1 || total <= 1) {
      tree.nodes[static_cast<std::size_t>(node_index)].leaf_class = majority(counts);
      return node_index;
    }

    // m distinct features, examined in ascending order
    std::array<int, kFeatureCount> pool;
    for (int i = 0; i < kFeatureCount; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < m_; ++i) {
      int j = i + rng_.below_int(kFeatureCount - i);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    std::vector<int> features(pool.begin(), pool.begin() + m_);
    std::sort(features.begin(), features.end());

    double node_measure = static_cast<double>(total) * gini(counts, total);
    int best_feature = -1;
    double best_threshold = 0;
    double best_children = std::numeric_limits<double>::infinity();

    std::vector<std::pair<double, int>> ordered(items.size());  // value, item index
    std::vector<long> left(static_cast<std::size_t>(class_count_), 0);
    for (int f : features) {
      for (std::size_t i = 0; i < items.size(); ++i)
        ordered[i] = {x_[static_cast<std::size_t>(items[i].sample)][static_cast<std::size_t>(f)],
                      static_cast<int>(i)};
      std::sort(ordered.begin(), ordered.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::fill(left.begin(), left.end(), 0);
      long wl = 0;
      for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
        const Item& it = items[static_cast<std::size_t>(ordered[i].second)];
        left[static_cast<std::size_t>(y_[static_cast<std::size_t>(it.sample)])] += it.weight;
        wl += it.weight;
        if (ordered[i + 1].first <= ordered[i].first) continue;  // no boundary here
        long wr = total - wl;
        std::vector<long> right(counts);
        for (std::size_t k = 0; k < right.size(); ++k) right[k] -= left[k];
        double children = static_cast<double>(wl) * gini(left, wl) +
                          static_cast<double>(wr) * gini(right, wr);
        if (children < best_children - 1e-12) {
          best_children = children;
          best_feature = f;
          best_threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
        }
      }
    }

    if (best_feature < 0) {  // all sampled features constant on this node
      tree.nodes[static_cast<std::size_t>(node_index)].leaf_class = majority(counts);
      return node_index;
    }

    gains_[static_cast<std::size_t>(best_feature)] += node_measure - best_children;

    std::vector<Item> left_items, right_items;
    for (const Item& it : items) {
      if (x_[static_cast<std::size_t>(it.sample)][static_cast<std::size_t>(best_feature)] <=
          best_threshold)
        left_items.push_back(it);
      else
        right_items.push_back(it);
    }

    int l = grow(left_items, tree);
    int r = grow(right_items, tree);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return node_index;
  }

  const std::vector<std::array<double, kFeatureCount>>& x_;
  const std::vector<int>& y_;
  int class_count_;
  int m_;
  Rng rng_;
  std::array<double, kFeatureCount>& gains_;
};

}  // namespace

Tree train_single_tree(const std::vector<CrowdFeatures>& data, const std::vector<int>& weights,
                       int m, uint64_t seed) {
  if (data.empty() || weights.size() != data.size())
    throw Error(Errc::InvalidArgument, "weights must match the sample count");
  if (m < 1 || m > kFeatureCount)
    throw Error(Errc::InvalidArgument, "m must be between 1 and " + std::to_string(kFeatureCount));
  std::vector<std::array<double, kFeatureCount>> x(data.size());
  std::vector<int> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].label) throw Error(Errc::DegenerateTraining, "unlabeled training sample");
    x[i] = data[i].vector();
    y[i] = *data[i].label;
  }
  std::vector<Item> items;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (weights[i] > 0) items.push_back({static_cast<int>(i), weights[i]});
  if (items.empty()) throw Error(Errc::InvalidArgument, "all sample weights are zero");
  std::array<double, kFeatureCount> gains{};
  TreeBuilder builder(x, y, kCrowdClassCount, m, Rng(seed), gains);
  return builder.build(items);
}

Forest train_forest(const std::vector<CrowdFeatures>& data, int num_trees, int m, uint64_t seed) {
  if (data.empty()) throw Error(Errc::DegenerateTraining, "empty training set");
  if (num_trees < 1) throw Error(Errc::InvalidArgument, "need at least one tree");
  if (m < 1 || m > kFeatureCount)
    throw Error(Errc::InvalidArgument, "m must be between 1 and " + std::to_string(kFeatureCount));

  const int n = static_cast<int>(data.size());
  std::vector<std::array<double, kFeatureCount>> x(static_cast<std::size_t>(n));
  std::vector<int> y(static_cast<std::size_t>(n));
  std::vector<bool> seen(kCrowdClassCount, false);
  for (int i = 0; i < n; ++i) {
    const CrowdFeatures& f = data[static_cast<std::size_t>(i)];
    if (!f.label) throw Error(Errc::DegenerateTraining, "unlabeled training sample");
    x[static_cast<std::size_t>(i)] = f.vector();
    y[static_cast<std::size_t>(i)] = *f.label;
    seen[static_cast<std::size_t>(*f.label)] = true;
  }
  int classes_present = 0;
  for (bool b : seen) classes_present += b ? 1 : 0;
  if (classes_present < 2)
    throw Error(Errc::DegenerateTraining, "training set contains a single class");

  Forest forest;
  forest.m = m;
  forest.seed = seed;
  forest.class_count = kCrowdClassCount;
  forest.trees.reserve(static_cast<std::size_t>(num_trees));
  forest.bootstrap_counts.assign(static_cast<std::size_t>(num_trees),
                                 std::vector<int>(static_cast<std::size_t>(n), 0));

  Rng root(seed);
  std::array<double, kFeatureCount> gains{};
  for (int t = 0; t < num_trees; ++t) {
    Rng tree_rng = root.fork(static_cast<uint64_t>(t));
    auto& counts = forest.bootstrap_counts[static_cast<std::size_t>(t)];
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(tree_rng.below_int(n))];
    std::vector<Item> items;
    for (int i = 0; i < n; ++i)
      if (counts[static_cast<std::size_t>(i)] > 0)
        items.push_back({i, counts[static_cast<std::size_t>(i)]});
    TreeBuilder builder(x, y, forest.class_count, m, tree_rng, gains);
    forest.trees.push_back(builder.build(items));
  }

  double total_gain = 0;
  for (double g : gains) total_gain += g;
  if (total_gain > 0)
    for (int f = 0; f < kFeatureCount; ++f)
      forest.importance[static_cast<std::size_t>(f)] = gains[static_cast<std::size_t>(f)] / total_gain;

  // out-of-bag error: vote each sample with the trees that never drew it
  long oob_samples = 0, oob_wrong = 0;
  std::vector<int> votes(static_cast<std::size_t>(forest.class_count));
  for (int i = 0; i < n; ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    int voters = 0;
    for (int t = 0; t < num_trees; ++t) {
      if (forest.bootstrap_counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] > 0)
        continue;
      ++votes[static_cast<std::size_t>(
          forest.trees[static_cast<std::size_t>(t)].predict(x[static_cast<std::size_t>(i)]))];
      ++voters;
    }
    if (voters == 0) continue;
    int best = 0;
    for (int k = 1; k < forest.class_count; ++k)
      if (votes[static_cast<std::size_t>(k)] > votes[static_cast<std::size_t>(best)]) best = k;
    ++oob_samples;
    if (best != y[static_cast<std::size_t>(i)]) ++oob_wrong;
  }
  if (oob_samples > 0)
    forest.oob_error = static_cast<double>(oob_wrong) / static_cast<double>(oob_samples);

  return forest;
}

ForestPrediction predict_forest(const Forest& forest, const CrowdFeatures& features) {
  if (!forest.trained()) throw Error(Errc::InvalidArgument, "forest is untrained");
  ForestPrediction out;
  out.votes.assign(static_cast<std::size_t>(forest.class_count), 0);
  auto v = features.vector();
  for (const Tree& t : forest.trees) ++out.votes[static_cast<std::size_t>(t.predict(v))];
  out.cls = 0;
  for (int k = 1; k < forest.class_count; ++k)
    if (out.votes[static_cast<std::size_t>(k)] > out.votes[static_cast<std::size_t>(out.cls)])
      out.cls = k;
  return out;
}

std::array<double, kFeatureCount> feature_importance(const Forest& forest) {
  if (!forest.trained()) throw Error(Errc::InvalidArgument, "forest is untrained");
  return forest.importance;
}

}  // namespace crowd
