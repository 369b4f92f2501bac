#include "eb/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

#include <Eigen/Cholesky>

#include "eb/matfun.hpp"
#include "eb/philox.hpp"

namespace eb::montecarlo {

namespace {

// Order-fixed pairwise reduction; keeps the result independent of how paths
// were distributed over workers.
template <typename F>
double pairwise_sum(std::size_t lo, std::size_t hi, F&& f) {
  if (hi - lo <= 32) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      s += f(i);
    }
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f);
}

struct StepTable {
  std::vector<double> dt;
  std::vector<Vector> beta;
  std::vector<Matrix> gain;
  std::vector<Vector> alpha;
};

// Piecewise-linear interpolation of (beta, K, alpha) at the step start times;
// clamped to the last node inside the terminal layer.
StepTable tabulate(const StrategyPath& path, double T, double dt) {
  StepTable table;
  const std::size_t full = static_cast<std::size_t>(std::floor(T / dt + 1e-9));
  table.dt.assign(full, dt);
  const double rem = T - static_cast<double>(full) * dt;
  if (rem > 1e-12 * std::max(1.0, T)) {
    table.dt.push_back(rem);
  }

  std::size_t seg = 0;
  double t = 0.0;
  for (std::size_t j = 0; j < table.dt.size(); ++j) {
    while (seg + 2 < path.times.size() && path.times[seg + 1] <= t) {
      ++seg;
    }
    const double t0 = path.times[seg];
    const double t1 = path.times[seg + 1];
    double w = (t - t0) / (t1 - t0);
    w = std::clamp(w, 0.0, 1.0);
    table.beta.push_back((1.0 - w) * path.beta[seg] + w * path.beta[seg + 1]);
    table.gain.push_back((1.0 - w) * path.K[seg] + w * path.K[seg + 1]);
    table.alpha.push_back((1.0 - w) * path.alpha[seg] + w * path.alpha[seg + 1]);
    t += table.dt[j];
  }
  return table;
}

}  // namespace

int worker_count() {
  int cap = 0;
  if (const char* env = std::getenv("EB_THREADS")) {
    cap = std::atoi(env);
    if (cap < 0) {
      cap = 0;
    }
  }
  if (cap == 0) {
    cap = static_cast<int>(std::thread::hardware_concurrency());
  }
  return std::max(1, cap);
}

SimResult simulate(const BridgeProblem& problem, const StrategyPath& path,
                   const SimConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  const SystemModel& model = problem.model;
  const Eigen::Index n = model.n();
  const Eigen::Index m = model.m();
  const double T = problem.T;

  if (config.paths < 100) {
    throw ConfigError("simulate: paths must be at least 100");
  }
  if (!(config.dt > 0.0) || config.dt > T / 64.0 * (1.0 + 1e-12)) {
    throw ConfigError("simulate: dt must satisfy 0 < dt <= T/64");
  }
  const double eps = config.eps_term < 0.0 ? 1e-6 * T : config.eps_term;
  if (path.size() < 2 || path.times.front() != 0.0 || path.times.back() + 1.5 * eps < T) {
    throw ConfigError("simulate: strategy path does not cover [0, T - eps_term]");
  }
  const double steps_est = std::ceil(T / config.dt);
  if (static_cast<double>(config.paths) * static_cast<double>(n) * steps_est >
      config.max_path_elements) {
    throw ConfigError("simulate: paths * n * steps exceeds the memory budget");
  }

  const StepTable table = tabulate(path, T, config.dt);
  const std::size_t steps = table.dt.size();
  const Matrix chol0 = problem.sigma.Pi.mat().llt().matrixL();

  const std::size_t paths = static_cast<std::size_t>(config.paths);
  std::vector<double> supply(paths);
  Matrix terminal(n, paths);

  const auto run_chunk = [&](std::size_t lo, std::size_t hi) {
    Vector normals(std::max(n, m));
    Vector x(n);
    Vector h(m);
    Vector drift(n);
    for (std::size_t i = lo; i < hi; ++i) {
      rng::fill_normals(config.seed, i, rng::kInitStep, normals.data(), static_cast<int>(n));
      x = problem.sigma.alpha + chol0 * normals.head(n);
      double acc = 0.0;
      for (std::size_t j = 0; j < steps; ++j) {
        const double dt = table.dt[j];
        h = table.beta[j] + table.gain[j] * (x - table.alpha[j]);
        acc += h.squaredNorm() * dt;
        rng::fill_normals(config.seed, i, static_cast<std::uint32_t>(j), normals.data(),
                          static_cast<int>(m));
        drift = model.mu() + model.A() * x + model.B() * h;
        x += drift * dt + std::sqrt(dt) * (model.B() * normals.head(m));
      }
      supply[i] = 0.5 * acc;
      terminal.col(i) = x;
    }
  };

  const int workers = std::min<int>(worker_count(), static_cast<int>(paths));
  if (workers <= 1) {
    run_chunk(0, paths);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(paths, lo + chunk);
      if (lo < hi) {
        pool.emplace_back(run_chunk, lo, hi);
      }
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  SimResult result;
  const double np = static_cast<double>(paths);
  result.supply_hat = pairwise_sum(0, paths, [&](std::size_t i) { return supply[i]; }) / np;
  const double var_supply = pairwise_sum(0, paths, [&](std::size_t i) {
                              const double d = supply[i] - result.supply_hat;
                              return d * d;
                            }) /
                            (np - 1.0);
  result.supply_stderr = std::sqrt(var_supply / np);

  result.mean_hat.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    result.mean_hat(c) =
        pairwise_sum(0, paths, [&](std::size_t i) { return terminal(c, i); }) / np;
  }
  result.cov_hat.resize(n, n);
  result.mean_ci_halfwidth.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = r; c < n; ++c) {
      const double cov = pairwise_sum(0, paths, [&](std::size_t i) {
                           return (terminal(r, i) - result.mean_hat(r)) *
                                  (terminal(c, i) - result.mean_hat(c));
                         }) /
                         (np - 1.0);
      result.cov_hat(r, c) = cov;
      result.cov_hat(c, r) = cov;
    }
    result.mean_ci_halfwidth(r) = 3.0 * std::sqrt(result.cov_hat(r, r) / np);
  }

  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

double gaussian_relative_entropy(const GaussianState& state, const GaussianState& ref) {
  if (state.n() != ref.n()) {
    throw ValidationError("gaussian_relative_entropy: dimension mismatch");
  }
  const Eigen::Index n = state.n();
  const Eigen::LLT<Matrix> llt_ref(ref.Pi.mat());
  const double logdet_ref = matfun::spd_logdet(ref.Pi.mat());
  const double logdet_state = matfun::spd_logdet(state.Pi.mat());
  const Vector r = state.alpha - ref.alpha;
  const double trace_term = llt_ref.solve(state.Pi.mat()).trace();
  const double mahal = r.dot(llt_ref.solve(r));
  return 0.5 * (logdet_ref - logdet_state + trace_term - static_cast<double>(n) + mahal);
}

double dissipation_audit(const BridgeProblem& problem, const StrategyPath& path) {
  if (path.size() < 2) {
    throw ValidationError("dissipation_audit: path must hold at least two nodes");
  }
  const SystemModel& model = problem.model;
  const auto invariant = nominal::invariant_moments(model);
  const GaussianState p_star{invariant.alpha_star, invariant.Pi_star};

  const double r0 = gaussian_relative_entropy(problem.sigma, p_star);
  const double r_t = gaussian_relative_entropy(problem.theta, p_star);
  const double supply = 0.5 * (path.mean_cost() + path.cov_cost());

  const Matrix ident = Matrix::Identity(model.n(), model.n());
  const Matrix pi_star_inv = invariant.Pi_star.mat().llt().solve(ident);
  const Matrix bt = model.B().transpose();

  std::vector<double> integrand(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Matrix pi_inv = path.Pi[k].llt().solve(ident);
    const Vector c = path.beta[k] - bt * pi_star_inv * (path.alpha[k] - invariant.alpha_star);
    const Matrix g = path.K[k] + bt * pi_inv - bt * pi_star_inv;
    integrand[k] = c.squaredNorm() + (g * path.Pi[k] * g.transpose()).trace();
  }
  double dissipated = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    dissipated += 0.5 * (integrand[k] + integrand[k + 1]) * (path.times[k + 1] - path.times[k]);
  }
  dissipated *= 0.5;

  return std::abs(r_t - r0 - supply + dissipated);
}

}  // namespace eb::montecarlo
