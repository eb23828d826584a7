#include "crowd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crowd {

using Complex = std::complex<double>;

void InteractionModel::validate() const {
  if (A.rows() != A.cols()) throw Error(Errc::DimensionMismatch, "interaction matrix not square");
  if (bias.size() != A.rows())
    throw Error(Errc::DimensionMismatch, "bias length does not match matrix dimension");
  if (!agent_order.empty() && static_cast<Eigen::Index>(agent_order.size()) != A.rows())
    throw Error(Errc::DimensionMismatch, "agent order does not match matrix dimension");
  if (!A.allFinite() || !bias.allFinite())
    throw Error(Errc::InvalidArgument, "model has non-finite entries");
}

Eigen::VectorXd step(const InteractionModel& model, const Eigen::VectorXd& x) {
  model.validate();
  if (x.size() != model.A.rows())
    throw Error(Errc::DimensionMismatch,
                "state length " + std::to_string(x.size()) + " does not match model size " +
                    std::to_string(model.A.rows()));
  return model.A * x + model.bias;
}

namespace {

// Phase-normalise a unit eigenvector so its largest-magnitude entry is real
// and positive. Conjugate pairs then map to conjugate columns.
void normalize_phase(Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  double best_mag = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double m = std::abs(v[i]);
    if (m > best_mag + 1e-15) {
      best_mag = m;
      best = i;
    }
  }
  if (best_mag <= 0) return;
  Complex phase = v[best] / best_mag;
  v /= phase;
  double n = v.norm();
  if (n > 0) v /= n;
}

bool in_one_disk(const Complex& lambda, const ModalOptions& opt) {
  double radius = std::max(opt.one_band_hi - 1.0, 1.0 - opt.one_band_lo);
  return std::abs(lambda - Complex(1.0, 0.0)) <= radius;
}

Complex cpow(const Complex& base, long k) {
  if (k == 0) return Complex(1.0, 0.0);
  if (base == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
  return std::pow(base, static_cast<double>(k));
}

}  // namespace

ModalDecomposition decompose(const InteractionModel& model, const Eigen::VectorXd& x0,
                             const ModalOptions& options) {
  model.validate();
  if (x0.size() != model.A.rows())
    throw Error(Errc::DimensionMismatch, "initial state does not match model size");

  const Eigen::Index n = model.A.rows();
  ModalDecomposition out;
  out.options = options;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(model.A);
  if (solver.info() != Eigen::Success) {
    out.defective = true;
    out.eigenvalues = Eigen::VectorXcd::Zero(n);
    out.eigenvectors = Eigen::MatrixXcd::Identity(n, n);
    out.c = Eigen::VectorXcd::Zero(n);
    out.d = Eigen::VectorXcd::Zero(n);
    return out;
  }

  Eigen::VectorXcd values = solver.eigenvalues();
  Eigen::MatrixXcd vectors = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    double ma = std::abs(values[a]), mb = std::abs(values[b]);
    if (std::abs(ma - mb) > 1e-14 * (1.0 + std::max(ma, mb))) return ma > mb;
    if (values[a].real() != values[b].real()) return values[a].real() > values[b].real();
    return values[a].imag() > values[b].imag();
  });

  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = values[order[static_cast<std::size_t>(i)]];
    Eigen::VectorXcd col = vectors.col(order[static_cast<std::size_t>(i)]);
    normalize_phase(col);
    out.eigenvectors.col(i) = col;
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.eigenvectors);
  double smin = svd.singularValues().tail(1)(0);
  double smax = svd.singularValues()(0);
  double cond = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  out.defective = !(cond <= options.cond_bound);

  if (!out.defective) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(out.eigenvectors);
    out.c = lu.solve(x0.cast<Complex>());
    out.d = lu.solve(model.bias.cast<Complex>());
  } else {
    out.c = Eigen::VectorXcd::Zero(n);
    out.d = Eigen::VectorXcd::Zero(n);
  }
  return out;
}

Eigen::VectorXd closed_form(const ModalDecomposition& decomp, long k) {
  if (decomp.defective)
    throw Error(Errc::DefectiveModel, "closed form undefined for a defective model");
  if (k < 0) throw Error(Errc::InvalidArgument, "step count must be non-negative");

  const Eigen::Index n = decomp.size();
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lambda = decomp.eigenvalues[i];
    Complex coeff;
    if (in_one_disk(lambda, decomp.options)) {
      coeff = decomp.c[i] + static_cast<double>(k) * decomp.d[i];
    } else {
      Complex lk = cpow(lambda, k);
      coeff = decomp.c[i] * lk + decomp.d[i] * (lk - 1.0) / (lambda - 1.0);
    }
    acc += coeff * decomp.eigenvectors.col(i);
  }
  return acc.real();
}

Eigen::VectorXd modal_velocity(const ModalDecomposition& decomp, long k) {
  if (decomp.defective)
    throw Error(Errc::DefectiveModel, "modal velocity undefined for a defective model");
  if (k < 1) throw Error(Errc::InvalidArgument, "velocity needs a step count of at least 1");

  const Eigen::Index n = decomp.size();
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lambda = decomp.eigenvalues[i];
    Complex coeff;
    if (in_one_disk(lambda, decomp.options)) {
      coeff = decomp.d[i];
    } else {
      coeff = (decomp.c[i] * (lambda - 1.0) + decomp.d[i]) * cpow(lambda, k - 1);
    }
    acc += coeff * decomp.eigenvectors.col(i);
  }
  return acc.real();
}

}  // namespace crowd
