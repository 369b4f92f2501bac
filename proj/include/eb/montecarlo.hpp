#pragma once

#include <cstdint>

#include "eb/strategy.hpp"

namespace eb {

/// Euler-Maruyama simulation settings. paths >= 100, dt <= T/64, and
/// paths * n * steps must stay within max_path_elements.
struct SimConfig {
  int paths = 10000;
  double dt = 0.0;
  std::uint64_t seed = 42;
  double eps_term = -1.0;              // default 1e-6 * T
  double max_path_elements = 1e9;
};

/// Empirical terminal moments and supply with sampling uncertainty.
struct SimResult {
  Vector mean_hat;
  Matrix cov_hat;
  double supply_hat;
  double supply_stderr;
  Vector mean_ci_halfwidth;  // 3 sigma, per coordinate
  double elapsed_seconds;
};

namespace montecarlo {

/// Worker cap from EB_THREADS (0 or unset = hardware concurrency).
int worker_count();

/// Simulates dX = (f(X) + B h) dt + B dW under the affine strategy
/// h_t = beta_t + K_t (X_t - alpha_t), with (beta, K, alpha) interpolated
/// piecewise-linearly from the path. Deterministic for fixed
/// (seed, paths, dt) regardless of the worker count.
SimResult simulate(const BridgeProblem& problem, const StrategyPath& path,
                   const SimConfig& config);

/// KL divergence D(state || ref) between Gaussian laws, in nats.
double gaussian_relative_entropy(const GaussianState& state, const GaussianState& ref);

/// Dissipation-equality audit: |R_T - R_0 - E_T + dissipated| with the
/// dissipated term in Gaussian closed form along the path. Must come out
/// below 1% of max(1, E_T) for a valid bridge.
double dissipation_audit(const BridgeProblem& problem, const StrategyPath& path);

}  // namespace montecarlo

}  // namespace eb
