#include "eb/nominal.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "eb/matfun.hpp"

namespace eb {

SystemModel::SystemModel(Matrix a, Matrix b, Vector mu)
    : a_(std::move(a)), b_(std::move(b)), mu_(std::move(mu)) {
  detail::require_square_finite(a_, "SystemModel A");
  const Eigen::Index n = a_.rows();
  if (b_.rows() != n || b_.cols() < n) {
    throw ValidationError("SystemModel B: expected n x m with m >= n, got " +
                          std::to_string(b_.rows()) + "x" + std::to_string(b_.cols()));
  }
  if (!b_.allFinite()) {
    throw ValidationError("SystemModel B: entries must be finite");
  }
  if (mu_.size() != n) {
    throw ValidationError("SystemModel mu: expected length n");
  }
  if (!mu_.allFinite()) {
    throw ValidationError("SystemModel mu: entries must be finite");
  }

  Eigen::EigenSolver<Matrix> es(a_);
  if (es.info() != Eigen::Success) {
    throw SolverError("SystemModel: eigensolver failed on A");
  }
  max_re_eig_ = es.eigenvalues().real().maxCoeff();
  if (max_re_eig_ >= -1e-10) {
    throw ValidationError("SystemModel A: not Hurwitz (max Re eigenvalue = " +
                          std::to_string(max_re_eig_) + ")");
  }

  d_ = b_ * b_.transpose();
  Eigen::LLT<Matrix> llt(d_);
  if (llt.info() != Eigen::Success) {
    throw ValidationError("SystemModel B: rank B < n (diffusion D = BB^T is singular)");
  }

  alpha_star_ = a_.partialPivLu().solve(-mu_);
  pi_star_ = matfun::lyap_solve(SquareMatrix(a_), SymMatrix(d_)).mat();
}

namespace nominal {

NominalMoments invariant_moments(const SystemModel& model) {
  return NominalMoments{model.alpha_star(), SpdMatrix(model.pi_star())};
}

SpdMatrix gramian(const SystemModel& model, double t) {
  if (!(t > 0.0)) {
    throw ValidationError("gramian: t must be positive");
  }
  const Matrix e = matfun::expm_raw(t * model.A());
  const Matrix g = model.pi_star() - e * model.pi_star() * e.transpose();
  return SpdMatrix(g);
}

Vector mean_semigroup(const SystemModel& model, double t, const Vector& alpha) {
  if (t < 0.0) {
    throw ValidationError("mean_semigroup: t must be nonnegative");
  }
  if (alpha.size() != model.n()) {
    throw ValidationError("mean_semigroup: alpha has wrong length");
  }
  if (t == 0.0) {
    return alpha;
  }
  const Matrix e = matfun::expm_raw(t * model.A());
  return model.alpha_star() + e * (alpha - model.alpha_star());
}

SpdMatrix cov_semigroup(const SystemModel& model, double t, const SpdMatrix& sigma) {
  if (t < 0.0) {
    throw ValidationError("cov_semigroup: t must be nonnegative");
  }
  if (sigma.dim() != model.n()) {
    throw ValidationError("cov_semigroup: Sigma has wrong dimension");
  }
  if (t == 0.0) {
    return sigma;
  }
  const Matrix e = matfun::expm_raw(t * model.A());
  const Matrix c =
      model.pi_star() + e * (sigma.mat() - model.pi_star()) * e.transpose();
  return SpdMatrix(c);
}

SpdMatrix cov_semigroup_inverse(const SystemModel& model, double T, const SpdMatrix& theta) {
  if (!(T > 0.0)) {
    throw ValidationError("cov_semigroup_inverse: T must be positive");
  }
  if (theta.dim() != model.n()) {
    throw ValidationError("cov_semigroup_inverse: Theta has wrong dimension");
  }
  const SpdMatrix gam = gramian(model, T);
  const Matrix residual = theta.mat() - gam.mat();
  Eigen::LLT<Matrix> llt(0.5 * (residual + residual.transpose()));
  if (llt.info() != Eigen::Success) {
    throw NotReachableError(
        "cov_semigroup_inverse: Theta - Gamma_T is not positive definite "
        "(terminal covariance not nominally reachable)");
  }
  const Matrix einv = matfun::expm_raw(-T * model.A());
  return SpdMatrix(einv * residual * einv.transpose());
}

Vector generator_mean(const SystemModel& model, const Vector& alpha) {
  if (alpha.size() != model.n()) {
    throw ValidationError("generator_mean: alpha has wrong length");
  }
  return model.mu() + model.A() * alpha;
}

SymMatrix generator_cov(const SystemModel& model, const SymMatrix& sigma) {
  if (sigma.dim() != model.n()) {
    throw ValidationError("generator_cov: Sigma has wrong dimension");
  }
  return SymMatrix(model.A() * sigma.mat() + sigma.mat() * model.A().transpose() + model.D());
}

}  // namespace nominal
}  // namespace eb
