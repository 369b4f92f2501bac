#include "eb/strategy.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "eb/matfun.hpp"

namespace eb::strategy {

namespace {

double default_eps(const BridgeProblem& problem, double eps_term) {
  if (eps_term < 0.0) {
    return 1e-6 * problem.T;
  }
  return eps_term;
}

std::vector<double> build_grid(double T, double eps, int steps) {
  // Uniform on [0, 0.9T]; the tail [0.9T, T - eps] is split at the geometric
  // boundaries T - 0.1T/2^j where the gain stiffens.
  std::vector<double> bounds;
  bounds.push_back(0.9 * T);
  double delta = 0.1 * T;
  while (0.5 * delta > eps) {
    delta *= 0.5;
    bounds.push_back(T - delta);
  }
  bounds.push_back(T - eps);

  const int uniform_steps = std::max(8, static_cast<int>(0.6 * steps));
  const int tail_segments = static_cast<int>(bounds.size()) - 1;
  const int per_segment =
      std::max(1, (steps - uniform_steps) / std::max(1, tail_segments));

  std::vector<double> grid;
  grid.reserve(uniform_steps + tail_segments * per_segment + 2);
  for (int i = 0; i <= uniform_steps; ++i) {
    grid.push_back(0.9 * T * i / uniform_steps);
  }
  for (int seg = 0; seg < tail_segments; ++seg) {
    for (int i = 1; i <= per_segment; ++i) {
      grid.push_back(bounds[seg] + (bounds[seg + 1] - bounds[seg]) * i / per_segment);
    }
  }
  grid.back() = T - eps;
  return grid;
}

bool is_pd(const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  return llt.info() == Eigen::Success;
}

struct Derivative {
  Vector dalpha;
  Matrix dpi;
  double dmean_cost;
  double dcov_cost;
  Vector beta;
  Matrix gain;
};

Derivative closed_loop_rhs(const BridgeProblem& problem, double t, const Vector& alpha,
                           const Matrix& pi) {
  const SystemModel& model = problem.model;
  const Vector beta = optimal_mean_drift(problem, t);
  const Matrix sym_pi = 0.5 * (pi + pi.transpose());
  const Matrix k =
      -model.B().transpose() *
      bridge::grad_S_sigma(model, problem.T - t, SpdMatrix(sym_pi), problem.theta.Pi).mat();

  Derivative d;
  d.beta = beta;
  d.gain = k;
  d.dalpha = model.mu() + model.A() * alpha + model.B() * beta;
  const Matrix bk_pi = model.B() * k * sym_pi;
  Matrix dpi = model.A() * sym_pi + sym_pi * model.A().transpose() + model.D() + bk_pi +
               bk_pi.transpose();
  d.dpi = 0.5 * (dpi + dpi.transpose());
  d.dmean_cost = beta.squaredNorm();
  d.dcov_cost = (k * sym_pi * k.transpose()).trace();
  return d;
}

// One integration sweep; returns false if Pi loses positive definiteness.
bool sweep(const BridgeProblem& problem, const std::vector<double>& grid, StrategyPath& out) {
  const Eigen::Index n = problem.model.n();
  out = StrategyPath{};
  out.times = grid;
  out.alpha.reserve(grid.size());
  out.Pi.reserve(grid.size());
  out.beta.reserve(grid.size());
  out.K.reserve(grid.size());
  out.cum_mean_cost.reserve(grid.size());
  out.cum_cov_cost.reserve(grid.size());

  Vector alpha = problem.sigma.alpha;
  Matrix pi = problem.sigma.Pi.mat();
  double mean_cost = 0.0;
  double cov_cost = 0.0;

  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!is_pd(pi)) {
      return false;
    }
    const double t = grid[k];
    const Derivative node = closed_loop_rhs(problem, t, alpha, pi);
    out.alpha.push_back(alpha);
    out.Pi.push_back(pi);
    out.beta.push_back(node.beta);
    out.K.push_back(node.gain);
    out.cum_mean_cost.push_back(mean_cost);
    out.cum_cov_cost.push_back(cov_cost);

    if (k + 1 == grid.size()) {
      break;
    }
    const double h = grid[k + 1] - t;

    const Derivative k1 = node;
    const Derivative k2 = closed_loop_rhs(problem, t + 0.5 * h, alpha + 0.5 * h * k1.dalpha,
                                          pi + 0.5 * h * k1.dpi);
    const Derivative k3 = closed_loop_rhs(problem, t + 0.5 * h, alpha + 0.5 * h * k2.dalpha,
                                          pi + 0.5 * h * k2.dpi);
    const Derivative k4 =
        closed_loop_rhs(problem, t + h, alpha + h * k3.dalpha, pi + h * k3.dpi);

    alpha += (h / 6.0) * (k1.dalpha + 2.0 * k2.dalpha + 2.0 * k3.dalpha + k4.dalpha);
    pi += (h / 6.0) * (k1.dpi + 2.0 * k2.dpi + 2.0 * k3.dpi + k4.dpi);
    pi = 0.5 * (pi + pi.transpose());
    mean_cost +=
        (h / 6.0) * (k1.dmean_cost + 2.0 * k2.dmean_cost + 2.0 * k3.dmean_cost + k4.dmean_cost);
    cov_cost +=
        (h / 6.0) * (k1.dcov_cost + 2.0 * k2.dcov_cost + 2.0 * k3.dcov_cost + k4.dcov_cost);
  }
  return true;
}

}  // namespace

Vector optimal_mean_drift(const BridgeProblem& problem, double t) {
  if (t < 0.0 || t > problem.T) {
    throw ValidationError("optimal_mean_drift: t must lie in [0, T]");
  }
  const SystemModel& model = problem.model;
  const SpdMatrix gamma = nominal::gramian(model, problem.T);
  const Vector reached = nominal::mean_semigroup(model, problem.T, problem.sigma.alpha);
  const Vector w = gamma.mat().llt().solve(problem.theta.alpha - reached);
  const Matrix e = matfun::expm_raw((problem.T - t) * model.A());
  return model.B().transpose() * e.transpose() * w;
}

Matrix optimal_gain(const BridgeProblem& problem, double t, const SpdMatrix& pi_t,
                    double eps_term) {
  const double eps = default_eps(problem, eps_term);
  if (!(problem.T - t > eps)) {
    throw ValidationError("optimal_gain: remaining horizon " + std::to_string(problem.T - t) +
                          " is inside the terminal layer eps_term = " + std::to_string(eps));
  }
  return -problem.model.B().transpose() *
         bridge::grad_S_sigma(problem.model, problem.T - t, pi_t, problem.theta.Pi).mat();
}

StrategyPath integrate_bridge(const BridgeProblem& problem, int steps, double eps_term) {
  if (steps < 16) {
    throw ConfigError("integrate_bridge: steps must be at least 16");
  }
  const double eps = default_eps(problem, eps_term);
  if (!(eps > 0.0) || eps >= 0.05 * problem.T) {
    throw ConfigError("integrate_bridge: eps_term must satisfy 0 < eps_term << T");
  }

  int attempt_steps = steps;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    StrategyPath path;
    if (sweep(problem, build_grid(problem.T, eps, attempt_steps), path)) {
      return path;
    }
    attempt_steps *= 2;
  }
  throw SolverError("integrate_bridge: Pi lost positive definiteness after 3 step-size "
                    "halvings");
}

}  // namespace eb::strategy
