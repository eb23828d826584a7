#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <vector>

#include "crowd/dynamics.hpp"
#include "crowd/tracks.hpp"

namespace crowd {

struct SolverConfig {
  int max_iters = 500;
  double tol = 1e-8;  // stop when the objective decrease falls below this
};

struct EstimatorConfig {
  int L = 25;  // window length in frames, hard cap 30
  double r1 = 1.0;
  double r2 = 0.05;
  NeighborConfig neighbors;
  SolverConfig solver;

  void validate() const;
};

struct RowEstimate {
  Eigen::VectorXd row;            // self, neighbors..., bias
  int iterations = 0;
  std::vector<double> objective;  // value after each iteration, non-increasing
};

// Row-wise solve of
//   min ||row' X_prev - x_next||^2 + r1 ||row - prev_row||^2 + r2 |row|_1
// by proximal gradient descent with backtracking; the bias coordinate (last,
// backed by the ones-row of X_prev) is exempt from the L1 penalty. Without
// prev_row the r1 term is dropped.
RowEstimate estimate_row(const Eigen::MatrixXd& X_prev, const Eigen::VectorXd& x_next,
                         const std::optional<Eigen::VectorXd>& prev_row, double r1, double r2,
                         const SolverConfig& solver);

struct SceneModel {
  InteractionModel model_x, model_y;
  FrameId end_frame = 0;
  std::map<AgentId, std::vector<AgentId>> neighbors;  // lists actually used
  std::map<AgentId, double> radii;
  std::vector<AgentId> excluded;  // live agents skipped for short history
};

// Estimates both axis models over the last config.L frames, one row per agent
// restricted to its spatial neighborhood. prev seeds the temporal-smoothness
// reference where neighbor sets overlap.
SceneModel estimate_scene(const TrackSet& tracks, FrameId end_frame, const SceneModel* prev,
                          const EstimatorConfig& config);

struct StepError {
  double x = 0;
  double y = 0;
  double combined = 0;
};

// Mean absolute k-step prediction error from frame n, per axis and combined.
StepError k_step_error(const TrackSet& tracks, const SceneModel& model, FrameId n, int k);

// E_n(k) for k = 1..k_max in one forward pass.
std::vector<StepError> k_step_profile(const TrackSet& tracks, const SceneModel& model, FrameId n,
                                      int k_max);

struct ValidationPoint {
  int k = 0;
  double x = 0;
  double y = 0;
  double combined = 0;
};

// Average E_n(k) over every admissible instant n, chaining the model estimate
// from one instant to the next.
std::vector<ValidationPoint> validation_curve(const TrackSet& tracks,
                                              const EstimatorConfig& config, int k_max);

}  // namespace crowd
