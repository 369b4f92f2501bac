#pragma once

#include <utility>

#include "eb/nominal.hpp"
#include "eb/types.hpp"

namespace eb {

/// A state-transition problem: drive the model from sigma to theta in time T.
struct BridgeProblem {
  SystemModel model;
  double T;
  GaussianState sigma;
  GaussianState theta;

  BridgeProblem(SystemModel m, double horizon, GaussianState initial, GaussianState terminal);
};

/// Mean/covariance split of the minimum required noise relative entropy,
/// total = (mean_part + cov_part) / 2, in nats.
struct SupplyBreakdown {
  double mean_part;
  double cov_part;
  double total;
};

/// Bookkeeping of the correction-scheme solution: the starting-solution
/// coefficients Xi_T, Ups_T and the correcting-solution data for the
/// lambda = 0, tau = -1 branch.
struct CorrectionTerms {
  SymMatrix Xi_T;    // e^{A^T T} Gamma_T^{-1} e^{A T}
  double Ups_T;      // 2 T Tr A - ln det Gamma_T
  SymMatrix mho;     // Theta^{-1}
  double rho;        // n ln 2
  SpdMatrix Psi_sq;  // e^{A^T T} Gamma_T^{-1} Theta Gamma_T^{-1} e^{A T}
  double lambda;     // 0
  double tau;        // -1
};

namespace bridge {

/// U_T(Sigma) = Gamma_T^{-1/2} C_T(Sigma) Gamma_T^{-1/2} - I, evaluated in
/// the equivalent difference-free form Gamma_T^{-1/2} e^{AT} Sigma e^{A^T T}
/// Gamma_T^{-1/2}, which is positive definite by construction.
SpdMatrix u_matrix(const SystemModel& model, double T, const SpdMatrix& sigma);
SpdMatrix u_matrix(const BridgeProblem& problem);

/// V_T(Theta) = Gamma_T^{-1/2} Theta Gamma_T^{-1/2}.
SpdMatrix v_matrix(const SystemModel& model, double T, const SpdMatrix& theta);

/// Covariance part S_T(Sigma, Theta) = ln det(2U) + Tr(U + V + chi(UV)).
double cov_supply(const SystemModel& model, double T, const SpdMatrix& sigma,
                  const SpdMatrix& theta);

/// Mean part ||alpha_T - M_T(alpha_0)||^2 in the Gamma_T^{-1} norm.
double mean_supply(const SystemModel& model, double T, const Vector& alpha0,
                   const Vector& alphaT);

/// J_T = (mean + cov)/2; also evaluates the assembled-matrix closed form of
/// the covariance part and verifies agreement to 1e-9 before returning.
SupplyBreakdown total_supply(const BridgeProblem& problem);

/// Analytic d/dSigma of cov_supply:
/// e^{A^T T} Gamma^{-1/2} (U^{-1} + I + V^{1/2} chi'(V^{1/2} U V^{1/2}) V^{1/2})
/// Gamma^{-1/2} e^{AT}.
SymMatrix grad_S_sigma(const SystemModel& model, double T, const SpdMatrix& sigma,
                       const SpdMatrix& theta);

/// HJE Hamiltonian F(Sigma, Phi) = Tr((A Sigma + Sigma A^T + D - D Phi Sigma) Phi).
double hamiltonian(const SystemModel& model, const SpdMatrix& sigma, const SymMatrix& phi);

/// |dS/dT - F(Sigma, dS/dSigma)| / max(1, |F|), with dS/dT by central
/// difference of step 1e-5 * max(1, T) and the Sigma-gradient analytic.
double hje_residual(const SystemModel& model, double T, const SpdMatrix& sigma,
                    const SpdMatrix& theta);

/// Starting solution S_hat_T(Sigma) = ln det U + Tr U and its machinery;
/// S_hat solves the covariance HJE on its own.
double shat_value(const SystemModel& model, double T, const SpdMatrix& sigma);
SymMatrix shat_grad(const SystemModel& model, double T, const SpdMatrix& sigma);
double shat_hje_residual(const SystemModel& model, double T, const SpdMatrix& sigma);

/// (s_hat, s_tilde) with s_hat = ln det U + Tr U and
/// s_tilde = Tr chi(UV) + Tr V + n ln 2; asserts s_hat + s_tilde equals
/// cov_supply to 1e-10 before returning.
std::pair<double, double> correction_decomposition(const SystemModel& model, double T,
                                                   const SpdMatrix& sigma,
                                                   const SpdMatrix& theta);

/// The correction-scheme coefficient matrices for a given (model, T, Theta).
CorrectionTerms correction_terms(const SystemModel& model, double T, const SpdMatrix& theta);

}  // namespace bridge

}  // namespace eb
