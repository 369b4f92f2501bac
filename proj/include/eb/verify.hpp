#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eb/bridge.hpp"

namespace eb::verify {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

using CheckList = std::vector<CheckResult>;

/// The desk benchmark: a = -1, B = sqrt(2), mu = 0, T = ln 2,
/// N(0, 1) -> N(1, 2). Closed-form supply (4/3 + 0.33407853...)/2.
BridgeProblem scalar_benchmark();

/// Boundary condition S_T(Sigma, C_T(Sigma)) = 0 on randomized problems.
CheckResult check_boundary(int instances = 50, int n_max = 5, double t_lo = 0.1,
                           double t_hi = 3.0, double tol = 1e-8, std::uint64_t seed = 11);

/// HJE residual for S_T and for the starting solution S_hat alone.
CheckList check_hje(const BridgeProblem* file_problem, int instances = 50, int n_max = 4,
                    double tol = 1e-5, std::uint64_t seed = 12);

/// Analytic Sigma-gradient against central finite differences.
CheckResult check_gradient(const BridgeProblem* file_problem, int instances = 20, int n_max = 3,
                           double tol = 1e-6, std::uint64_t seed = 13);

/// Brute-force transcription and least-norm oracles against the closed forms.
CheckList check_oracle(const BridgeProblem* file_problem, int cov_instances = 5,
                       double cov_tol = 0.01, int mean_L = 4096, double mean_tol = 1e-4,
                       std::uint64_t seed = 14);

/// Closed-loop integration reaches Theta and reproduces both supply parts.
CheckList check_reachability(int instances = 5, int steps = 512, double cost_tol = 5e-3,
                             double reach_tol = 1e-3, std::uint64_t seed = 15);

/// Monte Carlo supply and terminal moments on the scalar benchmark.
CheckList check_montecarlo(int paths = 10000, std::uint64_t seed = 42);

/// Dissipation equality audit plus Second-Law monotonicity.
CheckList check_dissipation(const BridgeProblem* file_problem, int instances = 3,
                            double tol = 0.01, std::uint64_t seed = 17);

/// chi((v-1)v) = 1 - 2v - ln(2(v-1)) over a deterministic grid in (1, 10].
CheckResult check_chi_identity(int values = 100, double tol = 1e-12);

/// Zero supply for invariant-to-invariant and nominally reachable endpoints.
CheckResult check_zero_supply(int instances = 20, double tol = 1e-8, std::uint64_t seed = 19);

/// Markovization gap: raw >= markovized with strict gap, plus an MC cross-check.
CheckList check_markov(int instances = 20, std::uint64_t seed = 20);

}  // namespace eb::verify
