#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "crowd/activity.hpp"
#include "crowd/rng.hpp"
#include "crowd/synthesis.hpp"

using namespace crowd;

namespace {

TrackSet offset_tracks(const TrackSet& t, double dx, double dy) {
  std::vector<TrackPoint> pts;
  for (auto p : t.points()) {
    p.x += dx;
    p.y += dy;
    pts.push_back(p);
  }
  return TrackSet::from_points(pts);
}

TrackSet scaled_tracks(const TrackSet& t, double s) {
  std::vector<TrackPoint> pts;
  for (auto p : t.points()) {
    p.x *= s;
    p.y *= s;
    pts.push_back(p);
  }
  return TrackSet::from_points(pts);
}

ModalDecomposition constructed(const Eigen::VectorXcd& lambdas, const Eigen::VectorXcd& c,
                               const Eigen::VectorXcd& d) {
  ModalDecomposition out;
  out.eigenvalues = lambdas;
  out.eigenvectors = Eigen::MatrixXcd::Identity(lambdas.size(), lambdas.size());
  out.c = c;
  out.d = d;
  return out;
}

}  // namespace

TEST_CASE("a lockstep pair fits exactly with an eigenvalue in the one-band") {
  ScenarioSpec spec;
  spec.frames = 26;
  spec.groups.push_back({2, MotionPattern::Walking, {12, 7}, {1.3, 0.0}, 0.8, 1.5});
  LabeledScene scene = generate(spec);

  auto models = estimate_group_model(scene.tracks, {0, 1}, 25, 25, 0.0);
  const InteractionModel& mx = models.first;

  // one-step residual by substitution
  Eigen::Vector2d xk(scene.tracks.coord(0, 24, Axis::X), scene.tracks.coord(1, 24, Axis::X));
  Eigen::Vector2d xk1(scene.tracks.coord(0, 25, Axis::X), scene.tracks.coord(1, 25, Axis::X));
  CHECK((mx.A * xk + mx.bias - xk1).cwiseAbs().maxCoeff() < 1e-6);

  Eigen::VectorXd x0(2);
  x0 << scene.tracks.coord(0, 1, Axis::X), scene.tracks.coord(1, 1, Axis::X);
  auto decomp = decompose(mx, x0);
  REQUIRE_FALSE(decomp.defective);
  double lam1 = std::abs(decomp.eigenvalues[0]);
  CHECK(lam1 > 0.995);
  CHECK(lam1 < 1.005);
  // the bias projection on the one-band mode carries the velocity
  Eigen::VectorXcd rec = decomp.eigenvectors.col(0) * decomp.d[0];
  CHECK(std::abs(rec[0].real() - 1.3) < 1e-6);
  CHECK(std::abs(rec[1].real() - 1.3) < 1e-6);
}

TEST_CASE("a singleton group reduces to the scalar fit") {
  ScenarioSpec spec;
  spec.frames = 20;
  spec.groups.push_back({1, MotionPattern::Walking, {5, 5}, {2.0, 0.0}, 0.8, 1.0});
  LabeledScene scene = generate(spec);
  auto models = estimate_group_model(scene.tracks, {0}, 19, 15, 0.0);
  CHECK(models.first.A.rows() == 1);
  // scalar shift map: mu = 1, b = 2 fits x(k+1) = x(k) + 2
  double mu = models.first.A(0, 0);
  double b = models.first.bias(0);
  double x = scene.tracks.coord(0, 10, Axis::X);
  CHECK(std::abs(mu * x + b - scene.tracks.coord(0, 11, Axis::X)) < 1e-8);
}

TEST_CASE("a window shorter than the group needs fails") {
  ScenarioSpec spec;
  spec.frames = 10;
  spec.groups.push_back({3, MotionPattern::Walking, {0, 0}, {1, 0}, 0.8, 1.0});
  LabeledScene scene = generate(spec);
  CHECK_THROWS_AS(estimate_group_model(scene.tracks, {0, 1, 2}, 9, 4, 0.0), Error);
}

TEST_CASE("deciding eigenvalue skips one-band modes without bias weight") {
  // eigenvalues (1, 0), c nonzero on both, d zero: the unit mode carries only
  // a constant position, so the zero mode decides
  Eigen::VectorXcd lam(2), c(2), d(2);
  lam << 1.0, 0.0;
  c << 140.0, 20.0;
  d << 0.0, 0.0;
  auto mu = deciding_eigenvalue(constructed(lam, c, d), ActivityBands{}, 140.0);
  REQUIRE(mu.has_value());
  CHECK(std::abs(*mu) == doctest::Approx(0.0));
  CHECK(classify_group_axis(mu, ActivityBands{}) == ActivityLabel::Stationary);
}

TEST_CASE("the approaching construction decides at the contraction rate") {
  // A = [[1,0],[0.2,0.8]], bias = (0, 24): x2 converges to 120
  InteractionModel m;
  m.A.resize(2, 2);
  m.A << 1.0, 0.0, 0.2, 0.8;
  m.bias.resize(2);
  m.bias << 0.0, 24.0;
  Eigen::VectorXd x0(2);
  x0 << 120.0, 100.0;
  auto decomp = decompose(m, x0);
  REQUIRE_FALSE(decomp.defective);

  // the unit mode contributes no velocity at any step
  for (long k : {1L, 3L, 10L}) {
    Eigen::VectorXd v = modal_velocity(decomp, k);
    // velocity is confined to the second agent's approach
    CHECK(std::abs(v[0]) < 1e-9);
  }
  auto mu = deciding_eigenvalue(decomp, ActivityBands{}, x0.norm());
  REQUIRE(mu.has_value());
  CHECK(std::abs(*mu) == doctest::Approx(0.8));
  CHECK(classify_group_axis(mu, ActivityBands{}) == ActivityLabel::Approaching);
}

TEST_CASE("a silent spectrum besides a constant-velocity mode decides at one") {
  Eigen::VectorXcd lam(2), c(2), d(2);
  lam << 1.0, 0.6;
  c << 5.0, 0.0;
  d << 2.0, 0.0;
  auto mu = deciding_eigenvalue(constructed(lam, c, d), ActivityBands{}, 5.0);
  REQUIRE(mu.has_value());
  CHECK(std::abs(*mu) == doctest::Approx(1.0));
}

TEST_CASE("an entirely silent decomposition decides nothing") {
  Eigen::VectorXcd lam(2), c(2), d(2);
  lam << 1.0, 0.5;
  c.setZero();
  d.setZero();
  auto mu = deciding_eigenvalue(constructed(lam, c, d), ActivityBands{}, 100.0);
  CHECK_FALSE(mu.has_value());
  CHECK(classify_group_axis(mu, ActivityBands{}) == ActivityLabel::Stationary);
}

TEST_CASE("group axis classification covers every modulus") {
  ActivityBands bands;
  auto at = [&](double m) {
    return classify_group_axis(std::complex<double>(m, 0), bands);
  };
  CHECK(at(0.0) == ActivityLabel::Stationary);
  CHECK(at(0.49) == ActivityLabel::Stationary);
  CHECK(at(0.97) == ActivityLabel::Approaching);
  CHECK(at(1.001) == ActivityLabel::Walking);
  CHECK(at(1.2) == ActivityLabel::Splitting);
  // totality sweep including the band edges
  for (double m = 0.0; m <= 1.6; m += 0.0005) {
    ActivityLabel l = at(m);
    bool known = l == ActivityLabel::Stationary || l == ActivityLabel::Approaching ||
                 l == ActivityLabel::Walking || l == ActivityLabel::Splitting;
    REQUIRE(known);
  }
  CHECK(at(bands.one_lo) == ActivityLabel::Approaching);
  CHECK(at(bands.one_hi) == ActivityLabel::Splitting);
}

TEST_CASE("axis activities merge by priority") {
  CHECK(merge_axis_activity(ActivityLabel::Splitting, ActivityLabel::Approaching) ==
        ActivityLabel::Splitting);
  CHECK(merge_axis_activity(ActivityLabel::Stationary, ActivityLabel::Stationary) ==
        ActivityLabel::Stationary);
  CHECK(merge_axis_activity(ActivityLabel::Walking, ActivityLabel::Approaching) ==
        ActivityLabel::Walking);
  CHECK(merge_axis_activity(ActivityLabel::Approaching, ActivityLabel::Splitting) ==
        ActivityLabel::Splitting);
  // the merged label never ranks below either axis label
  std::vector<ActivityLabel> all = {ActivityLabel::Stationary, ActivityLabel::Approaching,
                                    ActivityLabel::Walking, ActivityLabel::Splitting};
  auto rank = [&](ActivityLabel l) {
    return std::find(all.begin(), all.end(), l) - all.begin();
  };
  for (ActivityLabel a : all)
    for (ActivityLabel b : all) {
      ActivityLabel m = merge_axis_activity(a, b);
      CHECK(rank(m) >= rank(a));
      CHECK(rank(m) >= rank(b));
    }
}

TEST_CASE("atomic: a constant track is stationary") {
  std::vector<TrackPoint> pts;
  for (int k = 0; k < 20; ++k) pts.push_back({k, 0, 5.0, 5.0});
  TrackSet tracks = TrackSet::from_points(pts);
  ActivityConfig cfg;
  cfg.L = 20;
  AtomicActivity a = classify_atomic(tracks, 0, 19, cfg);
  CHECK(a.label == ActivityLabel::Stationary);
  CHECK(a.mu_x == doctest::Approx(1.0));
  CHECK(std::abs(a.b_x) < 1e-9);
}

TEST_CASE("atomic: a linear track is walking") {
  std::vector<TrackPoint> pts;
  for (int k = 0; k < 20; ++k) pts.push_back({k, 0, 10.0 + 2.0 * k, 3.0});
  TrackSet tracks = TrackSet::from_points(pts);
  ActivityConfig cfg;
  cfg.L = 20;
  AtomicActivity a = classify_atomic(tracks, 0, 19, cfg);
  CHECK(a.label == ActivityLabel::Walking);
  CHECK(a.mu_x == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.b_x == doctest::Approx(2.0).epsilon(1e-6));

  // scalar least-squares oracle: [x(k);1] rows against x(k+1)
  Eigen::MatrixXd X(19, 2);
  Eigen::VectorXd y(19);
  for (int k = 0; k < 19; ++k) {
    X(k, 0) = 10.0 + 2.0 * k;
    X(k, 1) = 1.0;
    y[k] = 10.0 + 2.0 * (k + 1);
  }
  Eigen::Vector2d oracle = X.colPivHouseholderQr().solve(y);
  CHECK(a.mu_x == doctest::Approx(oracle[0]).epsilon(1e-5));
  CHECK(a.b_x == doctest::Approx(oracle[1]).epsilon(1e-5));
}

TEST_CASE("atomic: a geometric track is stopping") {
  std::vector<TrackPoint> pts;
  for (int k = 0; k < 20; ++k)
    pts.push_back({k, 0, 120.0 - 20.0 * std::pow(0.8, k), 0.0});
  TrackSet tracks = TrackSet::from_points(pts);
  ActivityConfig cfg;
  cfg.L = 20;
  AtomicActivity a = classify_atomic(tracks, 0, 19, cfg);
  CHECK(a.label == ActivityLabel::Stopping);
  CHECK(a.mu_x == doctest::Approx(0.8).epsilon(1e-3));
}

TEST_CASE("classify_groups labels the four constructions") {
  ActivityConfig cfg;
  cfg.L = 25;

  auto run = [&](const GroupSpec& g) {
    ScenarioSpec spec;
    spec.frames = 26;
    spec.groups.push_back(g);
    LabeledScene scene = generate(spec);
    auto acts = classify_groups(scene.tracks, scene.partition, cfg);
    REQUIRE(acts.size() == 1);
    return acts[0];
  };

  CHECK(run({2, MotionPattern::Stationary, {140, 20}, {0, 0}, 0.8, 20.0}).label ==
        ActivityLabel::Stationary);
  CHECK(run({2, MotionPattern::Approaching, {120, 10}, {0, 0}, 0.8, 20.0}).label ==
        ActivityLabel::Approaching);
  CHECK(run({2, MotionPattern::Walking, {30, 30}, {1.5, 0.8}, 0.8, 1.5}).label ==
        ActivityLabel::Walking);
  CHECK(run({2, MotionPattern::Splitting, {50, 40}, {0, 0}, 1.05, 4.0}).label ==
        ActivityLabel::Splitting);
}

TEST_CASE("an all-stationary scene classifies every group stationary") {
  ScenarioSpec spec;
  spec.frames = 26;
  spec.groups.push_back({2, MotionPattern::Stationary, {10, 10}, {0, 0}, 0.8, 2.0});
  spec.groups.push_back({3, MotionPattern::Stationary, {60, 10}, {0, 0}, 0.8, 2.0});
  LabeledScene scene = generate(spec);
  ActivityConfig cfg;
  cfg.L = 25;
  auto acts = classify_groups(scene.tracks, scene.partition, cfg);
  for (const auto& a : acts) CHECK(a.label == ActivityLabel::Stationary);
}

TEST_CASE("group activity is invariant to a global translation") {
  ScenarioSpec spec;
  spec.frames = 26;
  spec.groups.push_back({2, MotionPattern::Approaching, {120, 10}, {0, 0}, 0.8, 20.0});
  spec.groups.push_back({2, MotionPattern::Walking, {30, 60}, {1.2, -0.5}, 0.8, 1.5});
  LabeledScene scene = generate(spec);

  ActivityConfig cfg;
  cfg.L = 25;
  auto base = classify_groups(scene.tracks, scene.partition, cfg);
  TrackSet moved = offset_tracks(scene.tracks, 500.0, -300.0);
  auto shifted = classify_groups(moved, scene.partition, cfg);
  REQUIRE(base.size() == shifted.size());
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(base[i].label == shifted[i].label);
}

TEST_CASE("eigenvalues are scale covariant for the unregularized fit") {
  // both members keep moving so the row problems have unique least-squares
  // solutions; degenerate rows would be resolved by a tie-break that need not
  // commute with scaling
  std::vector<TrackPoint> pts;
  for (int k = 0; k < 26; ++k) {
    pts.push_back({k, 0, 50.0 - 30.0 * std::pow(0.8, k), 20.0 + 10.0 * std::pow(0.85, k)});
    pts.push_back({k, 1, 80.0 - 40.0 * std::pow(0.9, k), 5.0 - 8.0 * std::pow(0.75, k)});
  }
  TrackSet tracks = TrackSet::from_points(pts);

  auto m1 = estimate_group_model(tracks, {0, 1}, 25, 25, 0.0);
  auto m2 = estimate_group_model(scaled_tracks(tracks, 3.5), {0, 1}, 25, 25, 0.0);
  Eigen::VectorXcd e1 = m1.first.A.eigenvalues();
  Eigen::VectorXcd e2 = m2.first.A.eigenvalues();
  std::sort(e1.data(), e1.data() + e1.size(),
            [](auto a, auto b) { return std::abs(a) < std::abs(b); });
  std::sort(e2.data(), e2.data() + e2.size(),
            [](auto a, auto b) { return std::abs(a) < std::abs(b); });
  for (int i = 0; i < 2; ++i) CHECK(std::abs(e1[i] - e2[i]) < 1e-6);
}

TEST_CASE("a defective group decomposition raises a defective-model error") {
  Eigen::VectorXcd lam(1), c(1), d(1);
  lam << 1.0;
  c << 1.0;
  d << 0.0;
  ModalDecomposition decomp = constructed(lam, c, d);
  decomp.defective = true;
  CHECK_THROWS_AS(deciding_eigenvalue(decomp, ActivityBands{}, 1.0), Error);
}

TEST_CASE("activity bands validate their ordering") {
  ActivityBands bad;
  bad.zero_hi = 0.997;
  CHECK_THROWS_AS(bad.validate(), Error);
}
