#include "crowd/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace crowd {

void EstimatorConfig::validate() const {
  if (L < 2 || L > 30)
    throw Error(Errc::InvalidArgument, "window length must be between 2 and 30 frames");
  if (r1 < 0 || r2 < 0)
    throw Error(Errc::InvalidArgument, "regularization weights must be non-negative");
  if (neighbors.frames_per_unknown <= 0)
    throw Error(Errc::InvalidArgument, "frames_per_unknown must be positive");
  if (solver.max_iters < 1) throw Error(Errc::InvalidArgument, "solver needs at least 1 iteration");
  if (solver.tol < 0) throw Error(Errc::InvalidArgument, "solver tolerance must be non-negative");
}

namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

RowEstimate estimate_row(const Eigen::MatrixXd& X_prev, const Eigen::VectorXd& x_next,
                         const std::optional<Eigen::VectorXd>& prev_row, double r1, double r2,
                         const SolverConfig& solver) {
  const Eigen::Index rows = X_prev.rows();
  const Eigen::Index m = X_prev.cols();
  if (rows < 1 || m < 1) throw Error(Errc::InvalidArgument, "empty row problem");
  if (x_next.size() != m)
    throw Error(Errc::DimensionMismatch, "target length does not match sample count");
  if (!X_prev.allFinite() || !x_next.allFinite())
    throw Error(Errc::InvalidArgument, "non-finite input values");
  if ((X_prev.row(rows - 1).array() - 1.0).abs().maxCoeff() > 1e-12)
    throw Error(Errc::InvalidArgument, "last row of the design matrix must be all ones");
  const bool smooth = prev_row.has_value() && r1 > 0;
  if (prev_row && prev_row->size() != rows)
    throw Error(Errc::DimensionMismatch, "previous row length does not match unknown count");

  const Eigen::Index n = rows - 1;  // position coefficients; the last unknown is the bias

  // Centered parametrization: predictions w.Xc + beta around the means. The
  // bias is recovered as b = beta - w.xbar + ybar. This leaves the objective
  // unchanged (the bias is L1-exempt) but decorrelates the ones-row from the
  // position rows, which the plain gradient iteration needs.
  Eigen::VectorXd xbar = X_prev.topRows(n).rowwise().mean();
  Eigen::MatrixXd Xc = X_prev.topRows(n).colwise() - xbar;
  double ybar = x_next.mean();
  Eigen::VectorXd yc = x_next.array() - ybar;

  Eigen::VectorXd wp = Eigen::VectorXd::Zero(n);
  double bp = 0;
  if (smooth) {
    wp = prev_row->head(n);
    bp = (*prev_row)(n);
  }

  // Jacobi scaling from the diagonal of the Hessian.
  Eigen::VectorXd hdiag(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    hdiag[i] = 2.0 * (Xc.row(i).squaredNorm() + (smooth ? r1 * (1.0 + xbar[i] * xbar[i]) : 0.0));
    hdiag[i] = std::max(hdiag[i], 1e-12);
  }
  hdiag[n] = 2.0 * (static_cast<double>(m) + (smooth ? r1 : 0.0));

  Eigen::VectorXd w = smooth ? wp : Eigen::VectorXd::Zero(n);
  double beta = smooth ? (wp.dot(xbar) + bp - ybar) : 0.0;

  auto bias_of = [&](const Eigen::VectorXd& wv, double betav) {
    return betav - wv.dot(xbar) + ybar;
  };
  auto smooth_f = [&](const Eigen::VectorXd& wv, double betav) {
    if (!smooth) return 0.0;
    double db = bias_of(wv, betav) - bp;
    return r1 * ((wv - wp).squaredNorm() + db * db);
  };
  auto data_f = [&](const Eigen::VectorXd& resid) { return resid.squaredNorm(); };
  auto penalty = [&](const Eigen::VectorXd& wv) { return r2 * wv.lpNorm<1>(); };

  Eigen::VectorXd resid = Xc.transpose() * w;
  resid.array() += beta;
  resid -= yc;

  RowEstimate out;
  double objective = data_f(resid) + smooth_f(w, beta) + penalty(w);
  out.objective.push_back(objective);

  double alpha = 1.0;
  Eigen::VectorXd grad(n + 1), w_new(n), cand_resid(m);
  for (int iter = 0; iter < solver.max_iters; ++iter) {
    grad.head(n) = 2.0 * (Xc * resid);
    grad[n] = 2.0 * resid.sum();
    if (smooth) {
      double db = bias_of(w, beta) - bp;
      grad.head(n) += 2.0 * r1 * ((w - wp) - db * xbar);
      grad[n] += 2.0 * r1 * db;
    }

    double f_cur = data_f(resid) + smooth_f(w, beta);
    double beta_new = 0;
    double f_new = 0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double t = alpha / hdiag[i];
        w_new[i] = soft_threshold(w[i] - t * grad[i], t * r2);
      }
      beta_new = beta - (alpha / hdiag[n]) * grad[n];

      cand_resid = Xc.transpose() * w_new;
      cand_resid.array() += beta_new;
      cand_resid -= yc;
      f_new = data_f(cand_resid) + smooth_f(w_new, beta_new);

      double lin = grad.head(n).dot(w_new - w) + grad[n] * (beta_new - beta);
      double quad = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double dwi = w_new[i] - w[i];
        quad += dwi * dwi * hdiag[i];
      }
      quad += (beta_new - beta) * (beta_new - beta) * hdiag[n];
      quad /= 2.0 * alpha;
      if (f_new <= f_cur + lin + quad + 1e-15 * std::abs(f_cur)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;

    double objective_new = f_new + penalty(w_new);
    double decrease = objective - objective_new;
    w.swap(w_new);
    beta = beta_new;
    resid.swap(cand_resid);
    objective = std::min(objective, objective_new);
    out.objective.push_back(objective);
    out.iterations = iter + 1;
    if (decrease <= solver.tol) break;
    alpha = std::min(alpha * 1.1, 1.0);
  }

  out.row.resize(n + 1);
  out.row.head(n) = w;
  out.row[n] = bias_of(w, beta);
  return out;
}

SceneModel estimate_scene(const TrackSet& tracks, FrameId end_frame, const SceneModel* prev,
                          const EstimatorConfig& config) {
  config.validate();
  const int L = config.L;
  const FrameId start = end_frame - L + 1;

  std::vector<AgentId> live = tracks.agents_at(end_frame);
  std::vector<AgentId> included, excluded;
  for (AgentId id : live) {
    if (tracks.covers(id, start, end_frame))
      included.push_back(id);
    else
      excluded.push_back(id);
  }
  if (included.empty())
    throw Error(Errc::InsufficientData, "no agent covers the estimation window ending at frame " +
                                            std::to_string(end_frame));

  const int N = static_cast<int>(included.size());
  std::map<AgentId, int> index_of;
  for (int i = 0; i < N; ++i) index_of[included[static_cast<std::size_t>(i)]] = i;

  SceneModel out;
  out.end_frame = end_frame;
  out.excluded = excluded;
  for (Axis axis : {Axis::X, Axis::Y}) {
    InteractionModel& model = axis == Axis::X ? out.model_x : out.model_y;
    model.axis = axis;
    model.agent_order = included;
    model.A = Eigen::MatrixXd::Zero(N, N);
    model.bias = Eigen::VectorXd::Zero(N);
  }

  AxisWindow wx = make_window(tracks, included, end_frame, L, Axis::X);
  AxisWindow wy = make_window(tracks, included, end_frame, L, Axis::Y);

  std::map<AgentId, int> prev_index;
  if (prev)
    for (std::size_t i = 0; i < prev->model_x.agent_order.size(); ++i)
      prev_index[prev->model_x.agent_order[i]] = static_cast<int>(i);

  for (int ai = 0; ai < N; ++ai) {
    AgentId agent = included[static_cast<std::size_t>(ai)];
    auto sel = select_neighbors(tracks, agent, end_frame, L, config.neighbors, &included);
    out.neighbors[agent] = sel.neighbors;
    out.radii[agent] = sel.radius;

    const int nu = static_cast<int>(sel.neighbors.size()) + 1;  // self + neighbors

    for (Axis axis : {Axis::X, Axis::Y}) {
      const AxisWindow& win = axis == Axis::X ? wx : wy;
      InteractionModel& model = axis == Axis::X ? out.model_x : out.model_y;

      Eigen::MatrixXd X(nu + 1, L - 1);
      X.row(0) = win.positions.row(ai).head(L - 1);
      for (int t = 0; t < nu - 1; ++t)
        X.row(t + 1) =
            win.positions.row(index_of.at(sel.neighbors[static_cast<std::size_t>(t)])).head(L - 1);
      X.row(nu).setOnes();
      Eigen::VectorXd y = win.positions.row(ai).tail(L - 1);

      std::optional<Eigen::VectorXd> prev_row;
      if (prev) {
        auto it = prev_index.find(agent);
        if (it != prev_index.end()) {
          const InteractionModel& pm = axis == Axis::X ? prev->model_x : prev->model_y;
          Eigen::VectorXd pr = Eigen::VectorXd::Zero(nu + 1);
          pr[0] = pm.A(it->second, it->second);
          for (int t = 0; t < nu - 1; ++t) {
            auto jt = prev_index.find(sel.neighbors[static_cast<std::size_t>(t)]);
            if (jt != prev_index.end()) pr[t + 1] = pm.A(it->second, jt->second);
          }
          pr[nu] = pm.bias(it->second);
          prev_row = std::move(pr);
        }
      }

      RowEstimate est = estimate_row(X, y, prev_row, config.r1, config.r2, config.solver);
      model.A(ai, ai) = est.row[0];
      for (int t = 0; t < nu - 1; ++t)
        model.A(ai, index_of.at(sel.neighbors[static_cast<std::size_t>(t)])) = est.row[t + 1];
      model.bias(ai) = est.row[nu];
    }
  }
  return out;
}

std::vector<StepError> k_step_profile(const TrackSet& tracks, const SceneModel& model, FrameId n,
                                      int k_max) {
  if (k_max < 1) throw Error(Errc::InvalidArgument, "horizon must be at least 1");
  const auto& agents = model.model_x.agent_order;
  const int N = static_cast<int>(agents.size());
  if (N == 0) throw Error(Errc::InvalidArgument, "model has no agents");
  for (AgentId id : agents)
    if (!tracks.covers(id, n, n + k_max))
      throw Error(Errc::MissingData, "prediction horizon exceeds the track of agent " +
                                         std::to_string(id));

  Eigen::VectorXd px(N), py(N);
  for (int j = 0; j < N; ++j) {
    px[j] = tracks.coord(agents[static_cast<std::size_t>(j)], n, Axis::X);
    py[j] = tracks.coord(agents[static_cast<std::size_t>(j)], n, Axis::Y);
  }

  std::vector<StepError> out(static_cast<std::size_t>(k_max));
  double sum_x = 0, sum_y = 0;
  for (int i = 1; i <= k_max; ++i) {
    px = step(model.model_x, px);
    py = step(model.model_y, py);
    for (int j = 0; j < N; ++j) {
      AgentId id = agents[static_cast<std::size_t>(j)];
      sum_x += std::abs(tracks.coord(id, n + i, Axis::X) - px[j]);
      sum_y += std::abs(tracks.coord(id, n + i, Axis::Y) - py[j]);
    }
    StepError& e = out[static_cast<std::size_t>(i - 1)];
    e.x = sum_x / (static_cast<double>(i) * N);
    e.y = sum_y / (static_cast<double>(i) * N);
    e.combined = 0.5 * (e.x + e.y);
  }
  return out;
}

StepError k_step_error(const TrackSet& tracks, const SceneModel& model, FrameId n, int k) {
  return k_step_profile(tracks, model, n, k).back();
}

std::vector<ValidationPoint> validation_curve(const TrackSet& tracks,
                                              const EstimatorConfig& config, int k_max) {
  config.validate();
  if (k_max < 1) throw Error(Errc::InvalidArgument, "horizon must be at least 1");
  FrameId first_n = tracks.first_frame() + config.L - 1;
  FrameId last_n = tracks.last_frame() - k_max;
  if (last_n < first_n)
    throw Error(Errc::InsufficientData, "track too short for the requested horizon");

  std::vector<ValidationPoint> acc(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) acc[static_cast<std::size_t>(k - 1)].k = k;

  SceneModel prev;
  bool have_prev = false;
  long count = 0;
  for (FrameId n = first_n; n <= last_n; ++n) {
    SceneModel model = estimate_scene(tracks, n, have_prev ? &prev : nullptr, config);
    auto profile = k_step_profile(tracks, model, n, k_max);
    for (int k = 1; k <= k_max; ++k) {
      auto& a = acc[static_cast<std::size_t>(k - 1)];
      const auto& e = profile[static_cast<std::size_t>(k - 1)];
      a.x += e.x;
      a.y += e.y;
      a.combined += e.combined;
    }
    prev = std::move(model);
    have_prev = true;
    ++count;
  }
  for (auto& a : acc) {
    a.x /= static_cast<double>(count);
    a.y /= static_cast<double>(count);
    a.combined /= static_cast<double>(count);
  }
  return acc;
}

}  // namespace crowd
