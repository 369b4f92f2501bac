#pragma once

#include <utility>

#include "eb/types.hpp"

namespace eb {

/// The nominal linear SDE dX = (mu + A X) dt + B dW with A Hurwitz and
/// D = B B^T positive definite (equivalently rank B = n <= m).
/// Invariant moments are precomputed at construction.
class SystemModel {
 public:
  SystemModel(Matrix a, Matrix b, Vector mu);

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Vector& mu() const { return mu_; }
  const Matrix& D() const { return d_; }

  Eigen::Index n() const { return a_.rows(); }
  Eigen::Index m() const { return b_.cols(); }

  /// Largest real part over the spectrum of A (negative for valid models).
  double max_re_eig() const { return max_re_eig_; }

  const Vector& alpha_star() const { return alpha_star_; }
  const Matrix& pi_star() const { return pi_star_; }

 private:
  Matrix a_;
  Matrix b_;
  Vector mu_;
  Matrix d_;
  double max_re_eig_;
  Vector alpha_star_;
  Matrix pi_star_;
};

/// Invariant mean and covariance of the nominal flow.
struct NominalMoments {
  Vector alpha_star;
  SpdMatrix Pi_star;
};

namespace nominal {

/// alpha_* = -A^{-1} mu and Pi_* solving A Pi + Pi A^T + D = 0.
NominalMoments invariant_moments(const SystemModel& model);

/// Finite-horizon controllability Gramian Gamma_t = Pi_* - e^{At} Pi_* e^{A^T t}.
SpdMatrix gramian(const SystemModel& model, double t);

/// M_t(alpha) = alpha_* + e^{At}(alpha - alpha_*).
Vector mean_semigroup(const SystemModel& model, double t, const Vector& alpha);

/// C_t(Sigma) = Pi_* + e^{At}(Sigma - Pi_*)e^{A^T t}.
SpdMatrix cov_semigroup(const SystemModel& model, double t, const SpdMatrix& sigma);

/// The Sigma with C_T(Sigma) = Theta; requires Theta - Gamma_T positive definite.
SpdMatrix cov_semigroup_inverse(const SystemModel& model, double T, const SpdMatrix& theta);

/// Generator of the mean semigroup: mu + A alpha.
Vector generator_mean(const SystemModel& model, const Vector& alpha);

/// Generator of the covariance semigroup: A Sigma + Sigma A^T + D.
SymMatrix generator_cov(const SystemModel& model, const SymMatrix& sigma);

}  // namespace nominal

}  // namespace eb
