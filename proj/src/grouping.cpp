#include "crowd/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>

namespace crowd {

using Complex = std::complex<double>;

int GroupPartition::group_count() const {
  int m = 0;
  for (const auto& [id, g] : labels) m = std::max(m, g);
  return m;
}

std::vector<std::vector<AgentId>> GroupPartition::groups() const {
  std::vector<std::vector<AgentId>> out(static_cast<std::size_t>(group_count()));
  for (const auto& [id, g] : labels) out[static_cast<std::size_t>(g - 1)].push_back(id);
  for (auto& g : out) std::sort(g.begin(), g.end());
  return out;
}

GroupPartition GroupPartition::from_groups(FrameId frame,
                                           const std::vector<std::vector<AgentId>>& groups) {
  // renumber densely by smallest contained agent id
  std::vector<std::pair<AgentId, std::size_t>> order;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) throw Error(Errc::InvalidArgument, "empty group");
    order.emplace_back(*std::min_element(groups[i].begin(), groups[i].end()), i);
  }
  std::sort(order.begin(), order.end());
  GroupPartition p;
  p.frame = frame;
  int next = 1;
  for (const auto& [min_id, idx] : order) {
    for (AgentId a : groups[idx]) {
      if (p.labels.count(a))
        throw Error(Errc::InvalidArgument, "agent " + std::to_string(a) + " listed twice");
      p.labels[a] = next;
    }
    ++next;
  }
  return p;
}

namespace {

struct SortedEigen {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
  bool usable = false;  // eigensolver converged and vectors are well conditioned
};

SortedEigen sorted_eigen(const Eigen::MatrixXd& A, double cond_bound) {
  SortedEigen out;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) return out;
  Eigen::VectorXcd values = solver.eigenvalues();
  Eigen::MatrixXcd vectors = solver.eigenvectors();
  const Eigen::Index n = values.size();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    double ma = std::abs(values[a]), mb = std::abs(values[b]);
    if (std::abs(ma - mb) > 1e-14 * (1.0 + std::max(ma, mb))) return ma > mb;
    if (values[a].real() != values[b].real()) return values[a].real() > values[b].real();
    return values[a].imag() > values[b].imag();
  });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = values[order[static_cast<std::size_t>(i)]];
    out.vectors.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.vectors);
  double smin = svd.singularValues().tail(1)(0);
  double smax = svd.singularValues()(0);
  out.usable = smin > 0 && smax / smin <= cond_bound;
  return out;
}

// Number of leading sorted eigenvalues at or above the threshold. Modes below
// it die out within the estimation window and carry no grouping evidence; an
// axis may legitimately keep none, leaving every agent at the origin of an
// empty embedding.
int selected_count(const Eigen::VectorXcd& values, double threshold) {
  const Eigen::Index n = values.size();
  int keep = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(values[i]) >= threshold) keep = static_cast<int>(i) + 1;
  return keep;
}

// Swap adjacent diagonal entries of a complex Schur form in place, updating U.
void schur_swap(Eigen::MatrixXcd& T, Eigen::MatrixXcd& U, Eigen::Index i) {
  Complex t11 = T(i, i), t12 = T(i, i + 1), t22 = T(i + 1, i + 1);
  Complex v1 = t12, v2 = t22 - t11;
  double nrm = std::sqrt(std::norm(v1) + std::norm(v2));
  if (nrm < 1e-300) return;  // equal eigenvalues, nothing to move
  v1 /= nrm;
  v2 /= nrm;
  Eigen::Matrix2cd G;
  G << v1, -std::conj(v2), v2, std::conj(v1);
  T.middleCols(i, 2) = T.middleCols(i, 2) * G;
  T.middleRows(i, 2) = G.adjoint() * T.middleRows(i, 2);
  U.middleCols(i, 2) = U.middleCols(i, 2) * G;
  T(i + 1, i) = Complex(0, 0);
}

// Orthonormal real basis of the invariant subspace for the selected
// eigenvalues, via a reordered complex Schur form. Serves as the generalized-
// eigenvector fallback when A is (near-)defective.
Eigen::MatrixXd schur_subspace(const Eigen::MatrixXd& A, double threshold, int* r_out) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(A.cast<Complex>());
  Eigen::MatrixXcd T = schur.matrixT();
  Eigen::MatrixXcd U = schur.matrixU();
  const Eigen::Index n = T.rows();

  auto keep = [&](Eigen::Index i) { return std::abs(T(i, i)) >= threshold; };

  Eigen::Index front = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!keep(i)) continue;
    for (Eigen::Index j = i; j > front; --j) schur_swap(T, U, j - 1);
    ++front;
  }
  int m = static_cast<int>(front);
  if (r_out) *r_out = m;
  if (m == 0) return Eigen::MatrixXd::Zero(n, 0);

  Eigen::MatrixXd W(n, 2 * m);
  W.leftCols(m) = U.leftCols(m).real();
  W.rightCols(m) = U.leftCols(m).imag();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(W);
  qr.setThreshold(1e-9);
  int rank = static_cast<int>(qr.rank());
  Eigen::MatrixXd Q =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, std::max(rank, 1)).leftCols(rank);
  return Q;
}

}  // namespace

Embedding embed(const InteractionModel& model, double threshold, double cond_bound) {
  model.validate();
  const Eigen::Index n = model.A.rows();
  Embedding out;
  out.agent_order = model.agent_order;
  out.threshold = threshold;

  SortedEigen eig = sorted_eigen(model.A, cond_bound);
  if (!eig.usable) {
    int r = 0;
    out.points = schur_subspace(model.A, threshold, &r);
    out.significant = r;
    return out;
  }

  int keep = selected_count(eig.values, threshold);
  out.significant = keep;

  std::vector<Eigen::VectorXd> cols;
  for (int i = 0; i < keep; ++i) {
    const Complex lambda = eig.values[i];
    if (std::abs(lambda.imag()) <= 1e-12 * (1.0 + std::abs(lambda))) {
      // real eigenvalue: rotate the vector onto the real axis
      Eigen::VectorXcd v = eig.vectors.col(i);
      Eigen::Index best = 0;
      v.cwiseAbs().maxCoeff(&best);
      Complex phase = v[best] / std::abs(v[best]);
      v /= phase;
      cols.push_back(v.real());
    } else if (lambda.imag() > 0) {
      cols.push_back(eig.vectors.col(i).real());
      cols.push_back(eig.vectors.col(i).imag());
    }
    // negative-imag member of a pair: covered by its partner
  }

  out.points.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    out.points.col(static_cast<Eigen::Index>(j)) = cols[j];
  return out;
}

GroupPartition cluster(const Embedding& embedding, double c) {
  if (c <= 0) throw Error(Errc::InvalidArgument, "clustering threshold must be positive");
  const Eigen::Index n = embedding.points.rows();
  if (static_cast<Eigen::Index>(embedding.agent_order.size()) != n)
    throw Error(Errc::DimensionMismatch, "embedding agent order does not match point count");

  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd mag(n);
  for (Eigen::Index i = 0; i < n; ++i) mag[i] = embedding.points.row(i).norm();

  auto linked = [&](Eigen::Index i, Eigen::Index j) {
    double dist = (embedding.points.row(i) - embedding.points.row(j)).norm();
    if (mag[i] < 1e-12 && mag[j] < 1e-12) return dist <= c;
    return dist <= c * std::min(mag[i], mag[j]);
  };

  int next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (comp[static_cast<std::size_t>(i)] >= 0) continue;
    std::vector<Eigen::Index> stack{i};
    comp[static_cast<std::size_t>(i)] = next;
    while (!stack.empty()) {
      Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < n; ++v) {
        if (comp[static_cast<std::size_t>(v)] >= 0 || !linked(u, v)) continue;
        comp[static_cast<std::size_t>(v)] = next;
        stack.push_back(v);
      }
    }
    ++next;
  }

  std::vector<std::vector<AgentId>> groups(static_cast<std::size_t>(next));
  for (Eigen::Index i = 0; i < n; ++i)
    groups[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])].push_back(
        embedding.agent_order[static_cast<std::size_t>(i)]);
  return GroupPartition::from_groups(0, groups);
}

GroupPartition merge_axis_labels(const GroupPartition& zx, const GroupPartition& zy) {
  if (zx.frame != zy.frame)
    throw Error(Errc::AgentMismatch, "axis partitions refer to different frames");
  if (zx.labels.size() != zy.labels.size())
    throw Error(Errc::AgentMismatch, "axis partitions cover different agents");
  for (const auto& [id, g] : zx.labels)
    if (!zy.labels.count(id))
      throw Error(Errc::AgentMismatch, "agent " + std::to_string(id) + " missing from one axis");

  GroupPartition out;
  out.frame = zx.frame;
  std::map<std::pair<int, int>, int> pair_label;
  int next = 1;
  for (const auto& [id, gx] : zx.labels) {  // ascending agent id
    std::pair<int, int> key{gx, zy.labels.at(id)};
    auto it = pair_label.find(key);
    if (it == pair_label.end()) it = pair_label.emplace(key, next++).first;
    out.labels[id] = it->second;
  }
  return out;
}

GroupPartition detect_groups([[maybe_unused]] const TrackSet& tracks, const SceneModel& scene,
                             const GroupingConfig& config) {
  Embedding ex = embed(scene.model_x, config.significance, config.cond_bound);
  Embedding ey = embed(scene.model_y, config.significance, config.cond_bound);
  GroupPartition px = cluster(ex, config.c);
  GroupPartition py = cluster(ey, config.c);
  px.frame = scene.end_frame;
  py.frame = scene.end_frame;
  GroupPartition merged = merge_axis_labels(px, py);

  // Spatial proximity: split every group into connected components of the
  // neighbor graph recorded in the scene model.
  std::map<AgentId, std::set<AgentId>> adj;
  for (const auto& [a, nbrs] : scene.neighbors)
    for (AgentId b : nbrs) {
      adj[a].insert(b);
      adj[b].insert(a);
    }

  std::vector<std::vector<AgentId>> final_groups;
  for (const auto& group : merged.groups()) {
    std::set<AgentId> remaining(group.begin(), group.end());
    while (!remaining.empty()) {
      std::vector<AgentId> comp;
      std::vector<AgentId> stack{*remaining.begin()};
      remaining.erase(remaining.begin());
      while (!stack.empty()) {
        AgentId u = stack.back();
        stack.pop_back();
        comp.push_back(u);
        auto it = adj.find(u);
        if (it == adj.end()) continue;
        for (AgentId v : it->second) {
          auto rit = remaining.find(v);
          if (rit != remaining.end()) {
            remaining.erase(rit);
            stack.push_back(v);
          }
        }
      }
      final_groups.push_back(std::move(comp));
    }
  }
  return GroupPartition::from_groups(scene.end_frame, final_groups);
}

}  // namespace crowd
