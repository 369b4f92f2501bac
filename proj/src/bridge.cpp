#include "eb/bridge.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "eb/matfun.hpp"

namespace eb {

BridgeProblem::BridgeProblem(SystemModel m, double horizon, GaussianState initial,
                             GaussianState terminal)
    : model(std::move(m)), T(horizon), sigma(std::move(initial)), theta(std::move(terminal)) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw ValidationError("BridgeProblem: horizon T must be positive and finite");
  }
  if (sigma.n() != model.n() || theta.n() != model.n()) {
    throw ValidationError("BridgeProblem: endpoint dimensions disagree with the model");
  }
}

namespace bridge {

namespace {

constexpr double kCondGuard = 1e12;

// Per-(model, T) working set behind the conditioning guard.
struct Horizon {
  Matrix e_at;            // e^{AT}
  Matrix gamma;           // Gamma_T
  Matrix gamma_inv;       // Gamma_T^{-1}
  Matrix gamma_inv_sqrt;  // Gamma_T^{-1/2}
  double logdet_gamma;
};

Horizon make_horizon(const SystemModel& model, double T) {
  if (!(T > 0.0)) {
    throw ValidationError("bridge: horizon T must be positive");
  }
  Horizon h;
  h.e_at = matfun::expm_raw(T * model.A());
  Matrix g = model.pi_star() - h.e_at * model.pi_star() * h.e_at.transpose();
  h.gamma = 0.5 * (g + g.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> es(h.gamma);
  if (es.info() != Eigen::Success) {
    throw SolverError("bridge: eigensolver failed on Gamma_T");
  }
  const Vector lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0 || lam.maxCoeff() / lam.minCoeff() > kCondGuard) {
    throw ConditioningError("bridge: Gamma_T is numerically singular (cond > 1e12); "
                            "the horizon is too short for the dynamics");
  }
  const Matrix q = es.eigenvectors();
  h.gamma_inv = q * lam.cwiseInverse().asDiagonal() * q.transpose();
  h.gamma_inv_sqrt = q * lam.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
  h.gamma_inv = 0.5 * (h.gamma_inv + h.gamma_inv.transpose());
  h.gamma_inv_sqrt = 0.5 * (h.gamma_inv_sqrt + h.gamma_inv_sqrt.transpose());
  h.logdet_gamma = lam.array().log().sum();
  return h;
}

SpdMatrix u_from_horizon(const Horizon& h, const SpdMatrix& sigma) {
  const Matrix l = h.gamma_inv_sqrt * h.e_at;
  return SpdMatrix(l * sigma.mat() * l.transpose());
}

SpdMatrix v_from_horizon(const Horizon& h, const SpdMatrix& theta) {
  return SpdMatrix(h.gamma_inv_sqrt * theta.mat() * h.gamma_inv_sqrt);
}

double cov_supply_impl(const Horizon& h, Eigen::Index n, const SpdMatrix& sigma,
                       const SpdMatrix& theta) {
  const SpdMatrix u = u_from_horizon(h, sigma);
  const SpdMatrix v = v_from_horizon(h, theta);
  const double logdet_2u = n * std::log(2.0) + matfun::spd_logdet(u.mat());
  return logdet_2u + u.mat().trace() + v.mat().trace() + matfun::trace_chi_product(u, v);
}

void check_dims(const SystemModel& model, const SpdMatrix& m, const char* what) {
  if (m.dim() != model.n()) {
    throw ValidationError(std::string(what) + ": dimension disagrees with the model");
  }
}

}  // namespace

SpdMatrix u_matrix(const SystemModel& model, double T, const SpdMatrix& sigma) {
  check_dims(model, sigma, "u_matrix");
  return u_from_horizon(make_horizon(model, T), sigma);
}

SpdMatrix u_matrix(const BridgeProblem& problem) {
  return u_matrix(problem.model, problem.T, problem.sigma.Pi);
}

SpdMatrix v_matrix(const SystemModel& model, double T, const SpdMatrix& theta) {
  check_dims(model, theta, "v_matrix");
  return v_from_horizon(make_horizon(model, T), theta);
}

double cov_supply(const SystemModel& model, double T, const SpdMatrix& sigma,
                  const SpdMatrix& theta) {
  check_dims(model, sigma, "cov_supply");
  check_dims(model, theta, "cov_supply");
  return cov_supply_impl(make_horizon(model, T), model.n(), sigma, theta);
}

double mean_supply(const SystemModel& model, double T, const Vector& alpha0,
                   const Vector& alphaT) {
  if (alpha0.size() != model.n() || alphaT.size() != model.n()) {
    throw ValidationError("mean_supply: mean vectors disagree with the model dimension");
  }
  const Horizon h = make_horizon(model, T);
  const Vector reached = model.alpha_star() + h.e_at * (alpha0 - model.alpha_star());
  const Vector r = alphaT - reached;
  return r.dot(h.gamma_inv * r);
}

SupplyBreakdown total_supply(const BridgeProblem& problem) {
  const SystemModel& model = problem.model;
  const Eigen::Index n = model.n();
  const Horizon h = make_horizon(model, problem.T);

  const double mean_part = mean_supply(model, problem.T, problem.sigma.alpha, problem.theta.alpha);
  const double cov_part = cov_supply_impl(h, n, problem.sigma.Pi, problem.theta.Pi);

  // Assembled-matrix form of the covariance part:
  // Tr(U + V - sqrt(I + 4UV)) - ln det((sqrt(I + 4UV) - I)(2U)^{-1}),
  // with sqrt(I + 4UV) represented through W = U^{1/2} V U^{1/2}.
  const SpdMatrix u = u_from_horizon(h, problem.sigma.Pi);
  const SpdMatrix v = v_from_horizon(h, problem.theta.Pi);
  const Matrix us = matfun::spd_sqrt(u.mat());
  Matrix w = us * v.mat() * us;
  w = 0.5 * (w + w.transpose());
  const Matrix root = matfun::spd_sqrt(Matrix::Identity(n, n) + 4.0 * w);
  const Matrix root_minus_i = root - Matrix::Identity(n, n);
  Eigen::PartialPivLU<Matrix> lu(root_minus_i);
  const Matrix& lu_m = lu.matrixLU();
  double logdet_root_minus_i = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double piv = lu_m(i, i);
    if (!(piv != 0.0) || !std::isfinite(piv)) {
      throw SolverError("total_supply: singular sqrt(I + 4UV) - I");
    }
    logdet_root_minus_i += std::log(std::abs(piv));
  }
  const double cov_direct = u.mat().trace() + v.mat().trace() - root.trace() -
                            logdet_root_minus_i + n * std::log(2.0) +
                            matfun::spd_logdet(u.mat());
  if (std::abs(cov_direct - cov_part) > 1e-9 * std::max(1.0, std::abs(cov_part))) {
    throw SolverError("total_supply: covariance HJE solution and assembled closed form "
                      "disagree beyond 1e-9");
  }

  return SupplyBreakdown{mean_part, cov_part, 0.5 * (mean_part + cov_part)};
}

SymMatrix grad_S_sigma(const SystemModel& model, double T, const SpdMatrix& sigma,
                       const SpdMatrix& theta) {
  check_dims(model, sigma, "grad_S_sigma");
  check_dims(model, theta, "grad_S_sigma");
  const Horizon h = make_horizon(model, T);
  const SpdMatrix u = u_from_horizon(h, sigma);
  const SpdMatrix v = v_from_horizon(h, theta);

  const Matrix u_inv = u.mat().llt().solve(Matrix::Identity(u.dim(), u.dim()));
  const Matrix inner =
      u_inv + Matrix::Identity(u.dim(), u.dim()) + matfun::v_chiprime_v(u, v).mat();
  const Matrix l = h.gamma_inv_sqrt * h.e_at;
  return SymMatrix(l.transpose() * inner * l);
}

double hamiltonian(const SystemModel& model, const SpdMatrix& sigma, const SymMatrix& phi) {
  check_dims(model, sigma, "hamiltonian");
  if (phi.dim() != model.n()) {
    throw ValidationError("hamiltonian: Phi dimension disagrees with the model");
  }
  const Matrix gen = model.A() * sigma.mat() + sigma.mat() * model.A().transpose() + model.D();
  return ((gen - model.D() * phi.mat() * sigma.mat()) * phi.mat()).trace();
}

double hje_residual(const SystemModel& model, double T, const SpdMatrix& sigma,
                    const SpdMatrix& theta) {
  const double h = 1e-5 * std::max(1.0, T);
  const double s_plus = cov_supply(model, T + h, sigma, theta);
  const double s_minus = cov_supply(model, T - h, sigma, theta);
  const double dt_s = (s_plus - s_minus) / (2.0 * h);
  const double f = hamiltonian(model, sigma, grad_S_sigma(model, T, sigma, theta));
  return std::abs(dt_s - f) / std::max(1.0, std::abs(f));
}

double shat_value(const SystemModel& model, double T, const SpdMatrix& sigma) {
  check_dims(model, sigma, "shat_value");
  const Horizon h = make_horizon(model, T);
  const SpdMatrix u = u_from_horizon(h, sigma);
  return matfun::spd_logdet(u.mat()) + u.mat().trace();
}

SymMatrix shat_grad(const SystemModel& model, double T, const SpdMatrix& sigma) {
  check_dims(model, sigma, "shat_grad");
  const Horizon h = make_horizon(model, T);
  // d/dSigma (ln det U + Tr U) = Sigma^{-1} + Xi_T.
  const Matrix sigma_inv = sigma.mat().llt().solve(Matrix::Identity(sigma.dim(), sigma.dim()));
  const Matrix xi = h.e_at.transpose() * h.gamma_inv * h.e_at;
  return SymMatrix(sigma_inv + xi);
}

double shat_hje_residual(const SystemModel& model, double T, const SpdMatrix& sigma) {
  const double h = 1e-5 * std::max(1.0, T);
  const double s_plus = shat_value(model, T + h, sigma);
  const double s_minus = shat_value(model, T - h, sigma);
  const double dt_s = (s_plus - s_minus) / (2.0 * h);
  const double f = hamiltonian(model, sigma, shat_grad(model, T, sigma));
  return std::abs(dt_s - f) / std::max(1.0, std::abs(f));
}

std::pair<double, double> correction_decomposition(const SystemModel& model, double T,
                                                   const SpdMatrix& sigma,
                                                   const SpdMatrix& theta) {
  check_dims(model, sigma, "correction_decomposition");
  check_dims(model, theta, "correction_decomposition");
  const Horizon h = make_horizon(model, T);
  const SpdMatrix u = u_from_horizon(h, sigma);
  const SpdMatrix v = v_from_horizon(h, theta);

  const double s_hat = matfun::spd_logdet(u.mat()) + u.mat().trace();
  // rho_T = n ln 2 + Tr(Theta Gamma_T^{-1}) = n ln 2 + Tr V.
  const double s_tilde =
      matfun::trace_chi_product(u, v) + v.mat().trace() + model.n() * std::log(2.0);

  const double s = cov_supply_impl(h, model.n(), sigma, theta);
  if (std::abs(s_hat + s_tilde - s) > 1e-10 * std::max(1.0, std::abs(s))) {
    throw SolverError("correction_decomposition: s_hat + s_tilde does not reassemble "
                      "the covariance supply");
  }
  return {s_hat, s_tilde};
}

CorrectionTerms correction_terms(const SystemModel& model, double T, const SpdMatrix& theta) {
  check_dims(model, theta, "correction_terms");
  const Horizon h = make_horizon(model, T);
  const Matrix xi = h.e_at.transpose() * h.gamma_inv * h.e_at;
  const double ups = 2.0 * T * model.A().trace() - h.logdet_gamma;
  const Matrix mho = theta.mat().llt().solve(Matrix::Identity(theta.dim(), theta.dim()));
  const Matrix psi_sq =
      h.e_at.transpose() * h.gamma_inv * theta.mat() * h.gamma_inv * h.e_at;
  return CorrectionTerms{SymMatrix(xi),
                         ups,
                         SymMatrix(mho),
                         model.n() * std::log(2.0),
                         SpdMatrix(psi_sq),
                         0.0,
                         -1.0};
}

}  // namespace bridge
}  // namespace eb
