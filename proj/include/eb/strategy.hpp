#pragma once

#include <vector>

#include "eb/bridge.hpp"

namespace eb {

/// Time-gridded optimal affine strategy and the closed-loop moment
/// trajectory it induces. Grid nodes are ascending with t_0 = 0 and the last
/// node at T - eps_term; costs are accumulated quadratures of |beta|^2 and
/// Tr(K Pi K^T).
struct StrategyPath {
  std::vector<double> times;
  std::vector<Vector> alpha;
  std::vector<Matrix> Pi;
  std::vector<Vector> beta;
  std::vector<Matrix> K;
  std::vector<double> cum_mean_cost;
  std::vector<double> cum_cov_cost;

  std::size_t size() const { return times.size(); }
  double mean_cost() const { return cum_mean_cost.back(); }
  double cov_cost() const { return cum_cov_cost.back(); }
};

namespace strategy {

/// beta_t = B^T e^{A^T (T-t)} Gamma_T^{-1} (alpha_T - M_T(alpha_0)).
Vector optimal_mean_drift(const BridgeProblem& problem, double t);

/// K(t, Pi_t) = -B^T dS_{T-t}(Pi_t, Pi_T)/dSigma. The remaining horizon must
/// stay above the terminal layer eps_term (default 1e-6 * T).
Matrix optimal_gain(const BridgeProblem& problem, double t, const SpdMatrix& pi_t,
                    double eps_term = -1.0);

/// Integrates the closed-loop moment ODEs with classical RK4 on a grid that
/// is uniform on [0, 0.9T] and geometrically refined (ratio 0.5) down to
/// T - eps_term. steps >= 16; eps_term defaults to 1e-6 * T.
StrategyPath integrate_bridge(const BridgeProblem& problem, int steps = 512,
                              double eps_term = -1.0);

}  // namespace strategy

}  // namespace eb
