#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "crowd/metrics.hpp"
#include "crowd/rng.hpp"
#include "crowd/synthesis.hpp"

using namespace crowd;

namespace {

GroupPartition labels_of(const std::vector<int>& labels) {
  std::vector<std::vector<AgentId>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::size_t g = static_cast<std::size_t>(labels[i]);
    if (groups.size() < g) groups.resize(g);
    groups[g - 1].push_back(static_cast<AgentId>(i));
  }
  return GroupPartition::from_groups(0, groups);
}

GroupPartition random_partition(Rng& rng, int n, int k) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  // ensure every cluster is non-empty, then fill the rest uniformly
  for (int i = 0; i < n; ++i)
    labels[static_cast<std::size_t>(i)] = i < k ? i + 1 : 1 + rng.below_int(k);
  std::map<int, int> dense;
  int next = 1;
  for (int& l : labels) {
    if (!dense.count(l)) dense[l] = next++;
    l = dense[l];
  }
  return labels_of(labels);
}

// pairwise Rand index by explicit enumeration
double ri_bruteforce(const GroupPartition& a, const GroupPartition& b) {
  std::vector<AgentId> agents;
  for (const auto& [id, g] : a.labels) agents.push_back(id);
  long agree = 0, total = 0;
  for (std::size_t i = 0; i < agents.size(); ++i)
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      bool same_a = a.labels.at(agents[i]) == a.labels.at(agents[j]);
      bool same_b = b.labels.at(agents[i]) == b.labels.at(agents[j]);
      agree += same_a == same_b ? 1 : 0;
      ++total;
    }
  return static_cast<double>(agree) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("walking groups generate exactly linear tracks") {
  ScenarioSpec spec;
  spec.frames = 30;
  spec.groups.push_back({2, MotionPattern::Walking, {3, 4}, {1.0, 0.0}, 0.8, 2.0});
  LabeledScene scene = generate(spec);
  double sep0 = scene.tracks.coord(1, 0, Axis::X) - scene.tracks.coord(0, 0, Axis::X);
  for (int k = 0; k < 30; ++k) {
    CHECK(scene.tracks.coord(0, k, Axis::X) ==
          doctest::Approx(scene.tracks.coord(0, 0, Axis::X) + k).epsilon(1e-12));
    double sep = scene.tracks.coord(1, k, Axis::X) - scene.tracks.coord(0, k, Axis::X);
    CHECK(sep == doctest::Approx(sep0).epsilon(1e-12));
  }
}

TEST_CASE("an approaching member satisfies the scalar contraction exactly") {
  ScenarioSpec spec;
  spec.frames = 30;
  spec.groups.push_back({2, MotionPattern::Approaching, {120, 0}, {0, 0}, 0.8, 20.0});
  LabeledScene scene = generate(spec);

  // scalar least-squares fit of x(k+1) = mu x(k) + b on the moving member
  Eigen::MatrixXd X(29, 2);
  Eigen::VectorXd y(29);
  for (int k = 0; k < 29; ++k) {
    X(k, 0) = scene.tracks.coord(1, k, Axis::X);
    X(k, 1) = 1.0;
    y[k] = scene.tracks.coord(1, k + 1, Axis::X);
  }
  Eigen::Vector2d sol = X.colPivHouseholderQr().solve(y);
  CHECK(std::abs(sol[0] - 0.8) < 1e-6);
  CHECK(std::abs(sol[1] - 0.2 * 120.0) < 1e-4);
  // member 0 sits at the target
  CHECK(scene.tracks.coord(0, 0, Axis::X) == doctest::Approx(120.0));
  CHECK(scene.tracks.coord(0, 29, Axis::X) == doctest::Approx(120.0));
}

TEST_CASE("generation is deterministic per seed and noise has the right scale") {
  ScenarioSpec spec;
  spec.frames = 50;
  spec.noise_sigma = 0.5;
  spec.seed = 123;
  spec.groups.push_back({4, MotionPattern::Walking, {0, 0}, {1, 1}, 0.8, 2.0});

  LabeledScene a = generate(spec);
  LabeledScene b = generate(spec);
  for (const auto& [pa, pb] : {std::pair{a.tracks.points(), b.tracks.points()}})
    for (std::size_t i = 0; i < pa.size(); ++i) {
      REQUIRE(pa[i].x == pb[i].x);
      REQUIRE(pa[i].y == pb[i].y);
    }

  ScenarioSpec clean = spec;
  clean.noise_sigma = 0;
  LabeledScene base = generate(clean);
  double sumsq = 0;
  long count = 0;
  for (AgentId id : a.tracks.agents())
    for (FrameId k = 0; k < 50; ++k) {
      double dx = a.tracks.coord(id, k, Axis::X) - base.tracks.coord(id, k, Axis::X);
      double dy = a.tracks.coord(id, k, Axis::Y) - base.tracks.coord(id, k, Axis::Y);
      sumsq += dx * dx + dy * dy;
      count += 2;
    }
  double sd = std::sqrt(sumsq / count);
  CHECK(sd > 0.45);
  CHECK(sd < 0.55);
}

TEST_CASE("scenario validation rejects bad rates") {
  ScenarioSpec spec;
  spec.frames = 10;
  spec.groups.push_back({2, MotionPattern::Approaching, {0, 0}, {0, 0}, 1.2, 1.0});
  CHECK_THROWS_AS(generate(spec), Error);
  spec.groups[0].pattern = MotionPattern::Splitting;
  spec.groups[0].rate = 0.9;
  CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("nmi of identical partitions is one") {
  GroupPartition p = labels_of({1, 1, 2, 3, 3, 3});
  CHECK(nmi(p, p) == doctest::Approx(1.0));
}

TEST_CASE("nmi is zero for singletons against one cluster") {
  GroupPartition singles = labels_of({1, 2, 3, 4});
  GroupPartition lumped = labels_of({1, 1, 1, 1});
  CHECK(nmi(singles, lumped) == doctest::Approx(0.0));
}

TEST_CASE("nmi of two single-cluster partitions is defined as one") {
  GroupPartition a = labels_of({1, 1, 1});
  CHECK(nmi(a, a) == doctest::Approx(1.0));
}

TEST_CASE("independent balanced partitions have near-zero nmi") {
  Rng rng(55);
  double total = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    GroupPartition a = random_partition(rng, 1000, 4);
    GroupPartition b = random_partition(rng, 1000, 4);
    total += nmi(a, b);
  }
  CHECK(total / seeds < 0.05);
}

TEST_CASE("purity matches its closed forms") {
  GroupPartition p = labels_of({1, 1, 2, 3, 3, 3});
  CHECK(purity(p, p) == doctest::Approx(1.0));

  GroupPartition one = labels_of({1, 1, 1, 1});
  GroupPartition balanced = labels_of({1, 1, 2, 2});
  CHECK(purity(one, balanced) == doctest::Approx(0.5));  // 1/K with K=2

  GroupPartition singles = labels_of({1, 2, 3, 4});
  CHECK(purity(singles, balanced) == doctest::Approx(1.0));
}

TEST_CASE("rand index on the worked example is exactly one third") {
  GroupPartition pred = labels_of({1, 1, 2});
  GroupPartition truth = labels_of({1, 2, 2});
  CHECK(rand_index(pred, truth) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rand_index(pred, pred) == doctest::Approx(1.0));
}

TEST_CASE("the contingency formula matches brute-force pair enumeration") {
  Rng rng(91);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + rng.below_int(29);
    GroupPartition a = random_partition(rng, n, 1 + rng.below_int(std::min(n, 5)));
    GroupPartition b = random_partition(rng, n, 1 + rng.below_int(std::min(n, 5)));
    REQUIRE(rand_index(a, b) == doctest::Approx(ri_bruteforce(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("clustering metrics ignore label permutations and nmi/ri are symmetric") {
  Rng rng(133);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 4 + rng.below_int(20);
    GroupPartition a = random_partition(rng, n, 2 + rng.below_int(3));
    GroupPartition b = random_partition(rng, n, 2 + rng.below_int(3));

    // permuted relabeling of a: reverse the group numbering
    int k = a.group_count();
    std::vector<int> relabeled;
    for (const auto& [id, g] : a.labels) relabeled.push_back(k + 1 - g);
    std::map<int, int> dense;
    int next = 1;
    for (int& l : relabeled) {
      if (!dense.count(l)) dense[l] = next++;
      l = dense[l];
    }
    GroupPartition a_perm = labels_of(relabeled);

    CHECK(nmi(a, b) == doctest::Approx(nmi(a_perm, b)).epsilon(1e-12));
    CHECK(purity(a, b) == doctest::Approx(purity(a_perm, b)).epsilon(1e-12));
    CHECK(rand_index(a, b) == doctest::Approx(rand_index(a_perm, b)).epsilon(1e-12));
    CHECK(nmi(a, b) == doctest::Approx(nmi(b, a)).epsilon(1e-12));
    CHECK(rand_index(a, b) == doctest::Approx(rand_index(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("metrics reject mismatched agent sets") {
  GroupPartition a = labels_of({1, 1, 2});
  GroupPartition b = labels_of({1, 2});
  CHECK_THROWS_AS(nmi(a, b), Error);
  CHECK_THROWS_AS(purity(a, b), Error);
  CHECK_THROWS_AS(rand_index(a, b), Error);
}

TEST_CASE("rand index needs at least two agents") {
  GroupPartition a = labels_of({1});
  CHECK_THROWS_AS(rand_index(a, a), Error);
}

TEST_CASE("a perfect activity prediction yields a diagonal confusion matrix") {
  std::vector<ActivityLabel> labels = {ActivityLabel::Stationary, ActivityLabel::Approaching,
                                       ActivityLabel::Walking, ActivityLabel::Splitting,
                                       ActivityLabel::Walking};
  ActivityScore s = score_activities(labels, labels);
  CHECK(s.accuracy == doctest::Approx(1.0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(s.confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 0);
}

TEST_CASE("all-walking predictions stack mass in the walking column") {
  std::vector<ActivityLabel> truth = {ActivityLabel::Stationary, ActivityLabel::Approaching,
                                      ActivityLabel::Walking, ActivityLabel::Splitting};
  std::vector<ActivityLabel> pred(4, ActivityLabel::Walking);
  ActivityScore s = score_activities(pred, truth);
  int walking_col = 0;
  for (int t = 0; t < 4; ++t)
    walking_col += s.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(
        activity_class_index(ActivityLabel::Walking))];
  CHECK(walking_col == 4);
  CHECK(s.accuracy == doctest::Approx(0.25));  // trace / total
}

TEST_CASE("score_activities rejects the atomic-only vocabulary") {
  std::vector<ActivityLabel> bad = {ActivityLabel::Stopping};
  CHECK_THROWS_AS(score_activities(bad, bad), Error);
}

TEST_CASE("singleton groups carry atomic ground-truth labels") {
  ScenarioSpec spec;
  spec.frames = 20;
  spec.groups.push_back({1, MotionPattern::Approaching, {10, 0}, {0, 0}, 0.8, 5.0});
  spec.groups.push_back({1, MotionPattern::Walking, {40, 0}, {1, 0}, 0.8, 1.0});
  LabeledScene scene = generate(spec);
  CHECK(scene.activities[0] == ActivityLabel::Stopping);
  CHECK(scene.activities[1] == ActivityLabel::Walking);
}
