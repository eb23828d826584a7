#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "crowd/error.hpp"
#include "crowd/tracks.hpp"

namespace crowd {

// First-order affine model for one axis: x(k+1) = A x(k) + bias.
struct InteractionModel {
  Axis axis = Axis::X;
  Eigen::MatrixXd A;
  Eigen::VectorXd bias;
  std::vector<AgentId> agent_order;

  int size() const { return static_cast<int>(A.rows()); }
  void validate() const;
};

Eigen::VectorXd step(const InteractionModel& model, const Eigen::VectorXd& x);

struct ModalOptions {
  double cond_bound = 1e8;    // eigenvector matrix condition beyond which A is
                              // treated as defective
  double one_band_lo = 0.995; // eigenvalues this close to 1 use the linear-
  double one_band_hi = 1.005; // growth branch of the closed form
  double imag_tol = 1e-9;     // imaginary residue discarded below this
};

// Eigensystem of A with the coefficients of x0 and bias in the eigenbasis.
// Eigenvalues are sorted by descending modulus; complex pairs stay adjacent.
struct ModalDecomposition {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // unit columns, phase-normalised
  Eigen::VectorXcd c;             // x0 = sum c_i e_i
  Eigen::VectorXcd d;             // bias = sum d_i e_i
  bool defective = false;
  ModalOptions options;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

ModalDecomposition decompose(const InteractionModel& model, const Eigen::VectorXd& x0,
                             const ModalOptions& options = {});

// Position after k steps, evaluated mode by mode. Eigenvalues within the
// one-band of 1 contribute c_i + k d_i; the rest contribute
// c_i lambda^k + d_i (lambda^k - 1) / (lambda - 1).
Eigen::VectorXd closed_form(const ModalDecomposition& decomp, long k);

// First difference of the closed form: sum over modes of
// {c_i (mu_i - 1) + d_i} mu_i^(k-1) u_i, with the same one-band handling.
Eigen::VectorXd modal_velocity(const ModalDecomposition& decomp, long k);

}  // namespace crowd
