#pragma once

#include <cstdint>
#include <vector>

#include "eb/nominal.hpp"

namespace eb {

/// Settings for the penalty-method direct transcription.
struct TranscriptionConfig {
  int steps = 256;
  std::vector<double> penalty_schedule = {1e2, 1e4, 1e6};
  int max_iters = 4000;           // per penalty stage
  double grad_tol = 1e-9;         // stop when ||g||_F <= grad_tol * (1 + |obj|)
  double armijo_c = 1e-4;
  double backtrack_shrink = 0.5;
  int max_backtracks = 60;
  double terminal_tol = 1e-3;     // allowed ||Pi_L - Theta||_F after the last stage
};

/// Raw and Markovized supplies of the non-Markov strategy h_t = k X_0.
struct MarkovGapResult {
  double raw_supply;
  double markovized_supply;
};

/// Monte Carlo counterpart of the gap demo, with standard errors.
struct MarkovGapMcResult {
  double raw_supply;
  double raw_stderr;
  double markovized_supply;
  double markovized_stderr;
};

namespace oracle {

/// Brute-force reference for the covariance supply: forward-Euler
/// transcription of the Pi dynamics with piecewise-constant gains, minimized
/// by gradient descent under an increasing penalty schedule. n <= 3.
double brute_force_cov_supply(const SystemModel& model, double T, const SpdMatrix& sigma,
                              const SpdMatrix& theta,
                              const TranscriptionConfig& config = {});

/// Exact discrete least-norm mean supply on L midpoint nodes.
double brute_force_mean_supply(const SystemModel& model, double T, const Vector& alpha0,
                               const Vector& alphaT, int L);

/// Same solve, also returning the optimizing discrete controls beta_k.
std::pair<double, std::vector<Vector>> brute_force_mean_controls(const SystemModel& model,
                                                                 double T, const Vector& alpha0,
                                                                 const Vector& alphaT, int L);

/// Closed-form moment-ODE demonstration that Markovization cannot increase
/// the supply: X_0 ~ N(0, Sigma0) and h_t = k X_0.
MarkovGapResult markovization_gap_demo(const SystemModel& model, double T, const Matrix& k,
                                       const SpdMatrix& sigma0);

/// Monte Carlo cross-check of the gap demo by conditional-expectation
/// regression of h on X_t across paths.
MarkovGapMcResult markovization_gap_mc(const SystemModel& model, double T, const Matrix& k,
                                       const SpdMatrix& sigma0, int paths, int steps,
                                       std::uint64_t seed);

}  // namespace oracle

}  // namespace eb
