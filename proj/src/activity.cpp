#include "crowd/activity.hpp"

#include <algorithm>
#include <cmath>

namespace crowd {

const char* to_string(ActivityLabel label) {
  switch (label) {
    case ActivityLabel::Stationary: return "Stationary";
    case ActivityLabel::Stopping: return "Stopping";
    case ActivityLabel::Approaching: return "Approaching";
    case ActivityLabel::Walking: return "Walking";
    case ActivityLabel::Splitting: return "Splitting";
  }
  return "Stationary";
}

ActivityLabel activity_from_string(const std::string& name) {
  if (name == "Stationary") return ActivityLabel::Stationary;
  if (name == "Stopping") return ActivityLabel::Stopping;
  if (name == "Approaching") return ActivityLabel::Approaching;
  if (name == "Walking") return ActivityLabel::Walking;
  if (name == "Splitting") return ActivityLabel::Splitting;
  throw Error(Errc::Parse, "unknown activity label '" + name + "'");
}

void ActivityBands::validate() const {
  if (!(zero_hi < one_lo))
    throw Error(Errc::InvalidArgument, "zero band must end below the one band");
  if (!(one_lo < 1.0 && 1.0 < one_hi))
    throw Error(Errc::InvalidArgument, "one band must contain 1");
  if (coeff_rel_tol < 0)
    throw Error(Errc::InvalidArgument, "coefficient tolerance must be non-negative");
}

namespace {

// Ridge-regularized row fit: min ||X' w - y||^2 + r1 ||w - ref||^2, solved in
// the deviation from ref so that rank-deficient directions stay at the
// reference even when r1 = 0. With penalize_bias false the last coordinate is
// excluded from the penalty.
Eigen::VectorXd ridge_row(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double r1,
                          const Eigen::VectorXd& ref, bool penalize_bias) {
  const Eigen::Index u = X.rows();
  const Eigen::Index m = X.cols();
  Eigen::VectorXd resid = y - X.transpose() * ref;
  if (r1 > 0) {
    const Eigen::Index p = penalize_bias ? u : u - 1;
    Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(m + p, u);
    stacked.topRows(m) = X.transpose();
    stacked.block(m, 0, p, p) = std::sqrt(r1) * Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd rhs(m + p);
    rhs.head(m) = resid;
    rhs.tail(p).setZero();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(stacked);
    return ref + cod.solve(rhs);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X.transpose());
  cod.setThreshold(1e-10);
  return ref + cod.solve(resid);
}

InteractionModel fit_axis_model(const AxisWindow& win, double r1, const InteractionModel* prev,
                                bool identity_reference) {
  const int M = static_cast<int>(win.agent_order.size());
  const int L = win.length;

  InteractionModel model;
  model.axis = win.axis;
  model.agent_order = win.agent_order;
  model.A = Eigen::MatrixXd::Zero(M, M);
  model.bias = Eigen::VectorXd::Zero(M);

  Eigen::MatrixXd X(M + 1, L - 1);
  X.topRows(M) = win.positions.leftCols(L - 1);
  X.row(M).setOnes();

  for (int i = 0; i < M; ++i) {
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(M + 1);
    if (prev) {
      ref.head(M) = prev->A.row(i);
      ref[M] = prev->bias[i];
    } else if (identity_reference) {
      ref[i] = 1.0;
    }
    Eigen::VectorXd y = win.positions.row(i).tail(L - 1);
    // Without a previous estimate the penalty is a synthetic prior; it shrinks
    // the interaction coefficients only, so position levels and drift stay in
    // the unpenalized bias instead of leaking into the eigenvalues.
    Eigen::VectorXd row = ridge_row(X, y, r1, ref, prev != nullptr);
    model.A.row(i) = row.head(M);
    model.bias[i] = row[M];
  }
  return model;
}

ActivityLabel atomic_axis_label(double mu, double b, double x0, const ActivityBands& bands) {
  double m = std::abs(mu);
  double tol = bands.coeff_rel_tol * std::abs(x0);
  if (bands.in_zero(m)) return ActivityLabel::Stationary;
  if (bands.in_one(m)) return std::abs(b) <= tol ? ActivityLabel::Stationary
                                                 : ActivityLabel::Walking;
  if (m <= bands.one_lo) return ActivityLabel::Stopping;
  return ActivityLabel::Walking;  // m >= one_hi
}

ActivityLabel merge_atomic(ActivityLabel a, ActivityLabel b) {
  auto rank = [](ActivityLabel l) {
    switch (l) {
      case ActivityLabel::Walking: return 2;
      case ActivityLabel::Stopping: return 1;
      default: return 0;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

std::pair<InteractionModel, InteractionModel> estimate_group_model(
    const TrackSet& tracks, const std::vector<AgentId>& group, FrameId end_frame, int L, double r1,
    const std::pair<InteractionModel, InteractionModel>* prev) {
  if (group.empty()) throw Error(Errc::InvalidArgument, "empty group");
  if (r1 < 0) throw Error(Errc::InvalidArgument, "smoothness weight must be non-negative");
  const int M = static_cast<int>(group.size());
  if (L < M + 2)
    throw Error(Errc::InsufficientData, "window of " + std::to_string(L) +
                                            " frames too short for a group of " +
                                            std::to_string(M));
  AxisWindow wx = make_window(tracks, group, end_frame, L, Axis::X);
  AxisWindow wy = make_window(tracks, group, end_frame, L, Axis::Y);
  return {fit_axis_model(wx, r1, prev ? &prev->first : nullptr, false),
          fit_axis_model(wy, r1, prev ? &prev->second : nullptr, false)};
}

std::optional<std::complex<double>> deciding_eigenvalue(const ModalDecomposition& decomp,
                                                        const ActivityBands& bands,
                                                        double x0_norm) {
  if (decomp.defective)
    throw Error(Errc::DefectiveModel, "deciding eigenvalue undefined for a defective model");
  double tol = bands.coeff_rel_tol * x0_norm;
  for (int i = 0; i < decomp.size(); ++i) {
    const auto lambda = decomp.eigenvalues[i];
    double modulus = std::abs(lambda);
    bool contributes;
    if (bands.in_one(modulus))
      contributes = std::abs(decomp.d[i]) > tol;
    else
      contributes = std::abs(decomp.c[i]) > tol || std::abs(decomp.d[i]) > tol;
    if (contributes) return lambda;
  }
  return std::nullopt;
}

ActivityLabel classify_group_axis(const std::optional<std::complex<double>>& mu,
                                  const ActivityBands& bands) {
  if (!mu) return ActivityLabel::Stationary;
  double m = std::abs(*mu);
  if (bands.in_zero(m)) return ActivityLabel::Stationary;
  if (bands.in_one(m)) return ActivityLabel::Walking;
  if (m <= bands.one_lo) return ActivityLabel::Approaching;
  return ActivityLabel::Splitting;  // m >= one_hi
}

ActivityLabel merge_axis_activity(ActivityLabel ax, ActivityLabel ay) {
  auto rank = [](ActivityLabel l) {
    switch (l) {
      case ActivityLabel::Splitting: return 3;
      case ActivityLabel::Walking: return 2;
      case ActivityLabel::Approaching: return 1;
      default: return 0;
    }
  };
  return rank(ax) >= rank(ay) ? ax : ay;
}

AtomicActivity classify_atomic(const TrackSet& tracks, AgentId agent, FrameId end_frame,
                               const ActivityConfig& config) {
  config.bands.validate();
  if (config.L < 3) throw Error(Errc::InsufficientData, "atomic fit needs at least 3 frames");
  std::vector<AgentId> self{agent};
  AxisWindow wx = make_window(tracks, self, end_frame, config.L, Axis::X);
  AxisWindow wy = make_window(tracks, self, end_frame, config.L, Axis::Y);

  InteractionModel mx = fit_axis_model(wx, config.r1, nullptr, true);
  InteractionModel my = fit_axis_model(wy, config.r1, nullptr, true);

  AtomicActivity out;
  out.agent = agent;
  out.mu_x = mx.A(0, 0);
  out.b_x = mx.bias(0);
  out.mu_y = my.A(0, 0);
  out.b_y = my.bias(0);
  out.label_x = atomic_axis_label(out.mu_x, out.b_x, wx.positions(0, 0), config.bands);
  out.label_y = atomic_axis_label(out.mu_y, out.b_y, wy.positions(0, 0), config.bands);
  out.label = merge_atomic(out.label_x, out.label_y);
  return out;
}

std::vector<GroupActivity> classify_groups(const TrackSet& tracks,
                                           const GroupPartition& partition,
                                           const ActivityConfig& config) {
  config.bands.validate();
  std::vector<GroupActivity> out;
  const FrameId end = partition.frame;
  auto groups = partition.groups();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& members = groups[gi];
    GroupActivity ga;
    ga.group_id = static_cast<int>(gi) + 1;
    ga.members = members;

    if (members.size() == 1) {
      AtomicActivity a = classify_atomic(tracks, members[0], end, config);
      ga.atomic = true;
      ga.mu_x = std::abs(a.mu_x);
      ga.mu_y = std::abs(a.mu_y);
      ga.lam_max_x = std::abs(a.mu_x);
      ga.lam_max_y = std::abs(a.mu_y);
      ga.label_x = a.label_x;
      ga.label_y = a.label_y;
      ga.label = a.label;
      out.push_back(std::move(ga));
      continue;
    }

    auto models = estimate_group_model(tracks, members, end, config.L, config.r1);
    ModalOptions opt;
    opt.cond_bound = config.cond_bound;
    opt.one_band_lo = config.bands.one_lo;
    opt.one_band_hi = config.bands.one_hi;

    for (Axis axis : {Axis::X, Axis::Y}) {
      const InteractionModel& model = axis == Axis::X ? models.first : models.second;
      AxisWindow win = make_window(tracks, members, end, config.L, axis);
      Eigen::VectorXd x0 = win.positions.col(0);
      ModalDecomposition decomp = decompose(model, x0, opt);
      auto mu = deciding_eigenvalue(decomp, config.bands, x0.norm());
      ActivityLabel label = classify_group_axis(mu, config.bands);
      double lam_max = decomp.size() > 0 ? std::abs(decomp.eigenvalues[0]) : 0.0;
      if (axis == Axis::X) {
        ga.mu_x = mu ? std::optional<double>(std::abs(*mu)) : std::nullopt;
        ga.lam_max_x = lam_max;
        ga.label_x = label;
      } else {
        ga.mu_y = mu ? std::optional<double>(std::abs(*mu)) : std::nullopt;
        ga.lam_max_y = lam_max;
        ga.label_y = label;
      }
    }
    ga.label = merge_axis_activity(ga.label_x, ga.label_y);
    out.push_back(std::move(ga));
  }
  return out;
}

}  // namespace crowd
