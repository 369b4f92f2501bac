#include "eb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "eb/matfun.hpp"
#include "eb/montecarlo.hpp"
#include "eb/oracle.hpp"
#include "eb/problem_io.hpp"
#include "eb/sampling.hpp"
#include "eb/strategy.hpp"

namespace eb::verify {

namespace {

std::string fmt(double v) { return io::format_g17(v); }

SystemModel scalar_model() {
  Matrix a(1, 1);
  a << -1.0;
  Matrix b(1, 1);
  b << std::sqrt(2.0);
  Vector mu = Vector::Zero(1);
  return SystemModel(a, b, mu);
}

// Entrywise gradient comparison; small entries are measured against 1% of
// the gradient scale so that roundoff in near-zero entries does not mask a
// genuine mismatch elsewhere.
double gradient_max_rel_err(const SystemModel& model, double T, const SpdMatrix& sigma,
                            const SpdMatrix& theta) {
  const Matrix g = bridge::grad_S_sigma(model, T, sigma, theta).mat();
  const double scale = g.cwiseAbs().maxCoeff();
  const double h = 1e-6 * std::max(1.0, sigma.mat().norm());
  const Eigen::Index n = sigma.dim();

  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Matrix bump = Matrix::Zero(n, n);
      if (i == j) {
        bump(i, i) = h;
      } else {
        bump(i, j) = 0.5 * h;
        bump(j, i) = 0.5 * h;
      }
      const double s_plus = bridge::cov_supply(model, T, SpdMatrix(sigma.mat() + bump), theta);
      const double s_minus = bridge::cov_supply(model, T, SpdMatrix(sigma.mat() - bump), theta);
      const double fd = (s_plus - s_minus) / (2.0 * h);
      const double denom = std::max({std::abs(g(i, j)), 0.01 * scale, 1e-12});
      worst = std::max(worst, std::abs(fd - g(i, j)) / denom);
    }
  }
  return worst;
}

}  // namespace

BridgeProblem scalar_benchmark() {
  Matrix one(1, 1);
  one << 1.0;
  Matrix two(1, 1);
  two << 2.0;
  return BridgeProblem(scalar_model(), std::log(2.0),
                       GaussianState(Vector::Zero(1), SpdMatrix(one)),
                       GaussianState(Vector::Ones(1), SpdMatrix(two)));
}

CheckResult check_boundary(int instances, int n_max, double t_lo, double t_hi, double tol,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> horizon(t_lo, t_hi);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int n = 1 + static_cast<int>(rng() % n_max);
    const SystemModel model = sampling::random_model(rng, n);
    const SpdMatrix sigma = sampling::random_spd(rng, n, 0.3, 3.0);
    const double T = horizon(rng);
    const SpdMatrix theta = nominal::cov_semigroup(model, T, sigma);
    worst = std::max(worst, std::abs(bridge::cov_supply(model, T, sigma, theta)));
  }
  return CheckResult{"boundary S_T(Sigma, C_T(Sigma)) = 0", worst <= tol,
                     "max |S| = " + fmt(worst) + " over " + std::to_string(instances) +
                         " problems (tol " + fmt(tol) + ")"};
}

CheckList check_hje(const BridgeProblem* file_problem, int instances, int n_max, double tol,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_s = 0.0;
  double worst_shat = 0.0;
  int count = 0;

  const auto visit = [&](const SystemModel& model, double T, const SpdMatrix& sigma,
                         const SpdMatrix& theta) {
    worst_s = std::max(worst_s, bridge::hje_residual(model, T, sigma, theta));
    worst_shat = std::max(worst_shat, bridge::shat_hje_residual(model, T, sigma));
    ++count;
  };

  if (file_problem != nullptr) {
    visit(file_problem->model, file_problem->T, file_problem->sigma.Pi, file_problem->theta.Pi);
  }
  for (int i = count; i < instances; ++i) {
    const int n = 1 + static_cast<int>(rng() % n_max);
    BridgeProblem p = sampling::random_bridge(rng, n, 0.3, 2.0);
    if (i % 4 == 3) {
      // Exercise the boundary manifold Theta = C_T(Sigma) as well.
      const SpdMatrix reachable = nominal::cov_semigroup(p.model, p.T, p.sigma.Pi);
      visit(p.model, p.T, p.sigma.Pi, reachable);
    } else {
      visit(p.model, p.T, p.sigma.Pi, p.theta.Pi);
    }
  }

  CheckList out;
  out.push_back({"HJE residual of S_T", worst_s <= tol,
                 "max residual = " + fmt(worst_s) + " over " + std::to_string(count) +
                     " problems (tol " + fmt(tol) + ")"});
  out.push_back({"HJE residual of the starting solution S_hat", worst_shat <= tol,
                 "max residual = " + fmt(worst_shat) + " (tol " + fmt(tol) + ")"});
  return out;
}

CheckResult check_gradient(const BridgeProblem* file_problem, int instances, int n_max,
                           double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  int count = 0;
  if (file_problem != nullptr) {
    worst = gradient_max_rel_err(file_problem->model, file_problem->T, file_problem->sigma.Pi,
                                 file_problem->theta.Pi);
    ++count;
  }
  for (int i = count; i < instances; ++i) {
    const int n = 1 + static_cast<int>(rng() % n_max);
    const BridgeProblem p = sampling::random_bridge(rng, n, 0.3, 2.0);
    worst = std::max(worst, gradient_max_rel_err(p.model, p.T, p.sigma.Pi, p.theta.Pi));
  }
  return CheckResult{"analytic Sigma-gradient vs finite differences", worst <= tol,
                     "max entrywise error = " + fmt(worst) + " over " + std::to_string(instances) +
                         " problems (tol " + fmt(tol) + ")"};
}

CheckList check_oracle(const BridgeProblem* file_problem, int cov_instances, double cov_tol,
                       int mean_L, double mean_tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckList out;

  const BridgeProblem base = file_problem != nullptr ? *file_problem : scalar_benchmark();

  {
    const double closed = bridge::cov_supply(base.model, base.T, base.sigma.Pi, base.theta.Pi);
    const double brute =
        oracle::brute_force_cov_supply(base.model, base.T, base.sigma.Pi, base.theta.Pi);
    const double gap = std::abs(brute - closed) / std::max(1e-12, std::abs(closed));
    out.push_back({"covariance oracle on the benchmark problem", gap <= cov_tol,
                   "closed form " + fmt(closed) + ", transcription " + fmt(brute) +
                       ", relative gap " + fmt(gap)});
  }

  double worst_gap = 0.0;
  for (int i = 0; i < cov_instances; ++i) {
    const BridgeProblem p = sampling::random_bridge(rng, 2, 0.4, 1.2);
    const double closed = bridge::cov_supply(p.model, p.T, p.sigma.Pi, p.theta.Pi);
    const double brute = oracle::brute_force_cov_supply(p.model, p.T, p.sigma.Pi, p.theta.Pi);
    worst_gap = std::max(worst_gap, std::abs(brute - closed) / std::max(1e-12, std::abs(closed)));
  }
  out.push_back({"covariance oracle on random n=2 problems", worst_gap <= cov_tol,
                 "max relative gap = " + fmt(worst_gap) + " over " +
                     std::to_string(cov_instances) + " problems (tol " + fmt(cov_tol) + ")"});

  double worst_mean = 0.0;
  {
    const double closed =
        bridge::mean_supply(base.model, base.T, base.sigma.alpha, base.theta.alpha);
    const double brute = oracle::brute_force_mean_supply(base.model, base.T, base.sigma.alpha,
                                                         base.theta.alpha, mean_L);
    worst_mean = std::abs(brute - closed) / std::max(1e-12, std::abs(closed));
  }
  for (int i = 0; i < 2; ++i) {
    const BridgeProblem p = sampling::random_bridge(rng, 2, 0.4, 1.5);
    const double closed = bridge::mean_supply(p.model, p.T, p.sigma.alpha, p.theta.alpha);
    const double brute =
        oracle::brute_force_mean_supply(p.model, p.T, p.sigma.alpha, p.theta.alpha, mean_L);
    worst_mean =
        std::max(worst_mean, std::abs(brute - closed) / std::max(1e-12, std::abs(closed)));
  }
  out.push_back({"least-norm mean oracle at L = " + std::to_string(mean_L),
                 worst_mean <= mean_tol,
                 "max relative gap = " + fmt(worst_mean) + " (tol " + fmt(mean_tol) + ")"});
  return out;
}

CheckList check_reachability(int instances, int steps, double cost_tol, double reach_tol,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_reach = 0.0;
  double worst_cost = 0.0;

  const auto visit = [&](const BridgeProblem& p) {
    const StrategyPath path = strategy::integrate_bridge(p, steps);
    const double eps = p.T - path.times.back();
    const SpdMatrix pulled = nominal::cov_semigroup_inverse(p.model, eps, p.theta.Pi);
    const double reach =
        (path.Pi.back() - pulled.mat()).norm() / std::max(1e-12, pulled.mat().norm());
    worst_reach = std::max(worst_reach, reach);

    const double mean_closed = bridge::mean_supply(p.model, p.T, p.sigma.alpha, p.theta.alpha);
    const double cov_closed = bridge::cov_supply(p.model, p.T, p.sigma.Pi, p.theta.Pi);
    const double mean_err =
        std::abs(path.mean_cost() - mean_closed) / std::max(1e-9, mean_closed);
    const double cov_err = std::abs(path.cov_cost() - cov_closed) / std::max(1e-9, cov_closed);
    worst_cost = std::max({worst_cost, mean_err, cov_err});
  };

  visit(scalar_benchmark());
  for (int i = 0; i < instances; ++i) {
    visit(sampling::random_bridge(rng, 2, 0.4, 1.5));
  }

  CheckList out;
  out.push_back({"closed-loop terminal covariance reaches Theta", worst_reach <= reach_tol,
                 "max relative Frobenius error = " + fmt(worst_reach) + " (tol " +
                     fmt(reach_tol) + ")"});
  out.push_back({"integrated costs match the closed-form supplies", worst_cost <= cost_tol,
                 "max relative cost error = " + fmt(worst_cost) + " (tol " + fmt(cost_tol) +
                     ")"});
  return out;
}

CheckList check_montecarlo(int paths, std::uint64_t seed) {
  const BridgeProblem p = scalar_benchmark();
  const StrategyPath path = strategy::integrate_bridge(p);
  SimConfig config;
  config.paths = paths;
  config.dt = p.T / Defaults::dt_divisor;
  config.seed = seed;
  const SimResult sim = montecarlo::simulate(p, path, config);
  const SupplyBreakdown supply = bridge::total_supply(p);

  CheckList out;
  const double dev = std::abs(sim.supply_hat - supply.total);
  out.push_back({"Monte Carlo supply within 3 stderr of J_T",
                 dev <= 3.0 * sim.supply_stderr,
                 "supply_hat = " + fmt(sim.supply_hat) + ", J = " + fmt(supply.total) +
                     ", |dev| = " + fmt(dev) + ", 3*stderr = " + fmt(3.0 * sim.supply_stderr)});

  bool mean_ok = true;
  for (Eigen::Index c = 0; c < p.model.n(); ++c) {
    mean_ok = mean_ok &&
              std::abs(sim.mean_hat(c) - p.theta.alpha(c)) <= sim.mean_ci_halfwidth(c);
  }
  out.push_back({"terminal mean within its 3 sigma CI", mean_ok,
                 "mean_hat = " + fmt(sim.mean_hat(0)) + " vs " + fmt(p.theta.alpha(0))});

  bool cov_ok = true;
  const double np = static_cast<double>(paths);
  for (Eigen::Index r = 0; r < p.model.n(); ++r) {
    for (Eigen::Index c = r; c < p.model.n(); ++c) {
      const Matrix& target = p.theta.Pi.mat();
      const double hw =
          3.0 * std::sqrt((target(r, r) * target(c, c) + target(r, c) * target(r, c)) / np);
      cov_ok = cov_ok && std::abs(sim.cov_hat(r, c) - target(r, c)) <= hw;
    }
  }
  out.push_back({"terminal covariance within its 3 sigma CI", cov_ok,
                 "cov_hat(0,0) = " + fmt(sim.cov_hat(0, 0)) + " vs " +
                     fmt(p.theta.Pi.mat()(0, 0))});
  return out;
}

CheckList check_dissipation(const BridgeProblem* file_problem, int instances, double tol,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckList out;

  double worst = 0.0;
  const auto visit = [&](const BridgeProblem& p) {
    const StrategyPath path = strategy::integrate_bridge(p);
    const double supply = 0.5 * (path.mean_cost() + path.cov_cost());
    const double residual = montecarlo::dissipation_audit(p, path);
    worst = std::max(worst, residual / std::max(1.0, supply));
  };
  visit(file_problem != nullptr ? *file_problem : scalar_benchmark());
  for (int i = 0; i < instances; ++i) {
    visit(sampling::random_bridge(rng, 2, 0.4, 1.5));
  }
  out.push_back({"dissipation equality along optimal bridges", worst <= tol,
                 "max residual / max(1, E_T) = " + fmt(worst) + " (tol " + fmt(tol) + ")"});

  // Second Law: zero strategy from a non-invariant start makes R_t fall.
  {
    SystemModel model = scalar_model();
    Matrix pi0(1, 1);
    pi0 << 0.4;
    Vector alpha0(1);
    alpha0 << 1.5;
    const double T = 2.0;
    const Vector alpha_t = nominal::mean_semigroup(model, T, alpha0);
    const SpdMatrix pi_t = nominal::cov_semigroup(model, T, SpdMatrix(pi0));
    const BridgeProblem p(std::move(model), T, GaussianState(alpha0, SpdMatrix(pi0)),
                          GaussianState(alpha_t, pi_t));
    const StrategyPath path = strategy::integrate_bridge(p);
    const auto invariant = nominal::invariant_moments(p.model);
    const GaussianState p_star{invariant.alpha_star, invariant.Pi_star};

    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); ++k) {
      const double r = montecarlo::gaussian_relative_entropy(
          GaussianState(path.alpha[k], SpdMatrix(path.Pi[k])), p_star);
      if (r > prev + 1e-9 * (1.0 + std::abs(prev))) {
        monotone = false;
      }
      prev = r;
    }
    const double residual = montecarlo::dissipation_audit(p, path);
    out.push_back({"Second-Law monotonicity under the nominal strategy",
                   monotone && residual <= tol,
                   std::string("R_t non-increasing: ") + (monotone ? "yes" : "no") +
                       ", audit residual = " + fmt(residual)});
  }
  return out;
}

CheckResult check_chi_identity(int values, double tol) {
  double worst = 0.0;
  for (int i = 1; i <= values; ++i) {
    const double v = 1.0 + 9.0 * i / values;
    const double lhs = matfun::chi((v - 1.0) * v);
    const double rhs = 1.0 - 2.0 * v - std::log(2.0 * (v - 1.0));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return CheckResult{"chi((v-1)v) = 1 - 2v - ln(2(v-1))", worst <= tol,
                     "max |dev| = " + fmt(worst) + " over " + std::to_string(values) +
                         " values (tol " + fmt(tol) + ")"};
}

CheckResult check_zero_supply(int instances, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> horizon(0.3, 2.0);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int n = 1 + static_cast<int>(rng() % 4);
    SystemModel model = sampling::random_model(rng, n);
    const double T = horizon(rng);
    const auto invariant = nominal::invariant_moments(model);

    const GaussianState star{invariant.alpha_star, invariant.Pi_star};
    const BridgeProblem stay(model, T, star, star);
    worst = std::max(worst, std::abs(bridge::total_supply(stay).total));

    const Vector alpha = sampling::random_vector(rng, n, 1.0);
    const SpdMatrix sigma = sampling::random_spd(rng, n, 0.3, 3.0);
    const GaussianState from{alpha, sigma};
    const GaussianState to{nominal::mean_semigroup(model, T, alpha),
                           nominal::cov_semigroup(model, T, sigma)};
    const BridgeProblem drift(std::move(model), T, from, to);
    worst = std::max(worst, std::abs(bridge::total_supply(drift).total));
  }
  return CheckResult{"zero supply for invariant and nominally reachable endpoints",
                     worst <= tol,
                     "max |J| = " + fmt(worst) + " over " + std::to_string(instances) +
                         " instances (tol " + fmt(tol) + ")"};
}

CheckList check_markov(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int strict = 0;
  bool ordered = true;
  double worst_violation = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const SystemModel model = sampling::random_model(rng, n);
    Matrix gain(model.m(), model.n());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index r = 0; r < gain.rows(); ++r) {
      for (Eigen::Index c = 0; c < gain.cols(); ++c) {
        gain(r, c) = normal(rng);
      }
    }
    const SpdMatrix sigma0 = sampling::random_spd(rng, n, 0.3, 3.0);
    std::uniform_real_distribution<double> horizon(0.5, 2.0);
    const auto gap = oracle::markovization_gap_demo(model, horizon(rng), gain, sigma0);
    if (gap.raw_supply < gap.markovized_supply - 1e-12) {
      ordered = false;
      worst_violation =
          std::max(worst_violation, gap.markovized_supply - gap.raw_supply);
    }
    if (gap.raw_supply - gap.markovized_supply >
        1e-10 * std::max(1.0, gap.raw_supply)) {
      ++strict;
    }
  }

  CheckList out;
  out.push_back({"Markovization never increases the supply",
                 ordered && strict >= instances - 1,
                 "ordered on all " + std::to_string(instances) + ", strict gap on " +
                     std::to_string(strict)});

  {
    const SystemModel model = scalar_model();
    Matrix gain(1, 1);
    gain << 1.0;
    Matrix one(1, 1);
    one << 1.0;
    const auto demo = oracle::markovization_gap_demo(model, 1.0, gain, SpdMatrix(one));
    const auto mc = oracle::markovization_gap_mc(model, 1.0, gain, SpdMatrix(one), 10000, 512,
                                                 4242);
    const bool raw_ok =
        std::abs(mc.raw_supply - demo.raw_supply) <= 3.0 * mc.raw_stderr;
    const bool mark_ok =
        std::abs(mc.markovized_supply - demo.markovized_supply) <= 3.0 * mc.markovized_stderr;
    out.push_back({"Monte Carlo regression cross-check of the gap demo", raw_ok && mark_ok,
                   "raw " + fmt(demo.raw_supply) + " vs " + fmt(mc.raw_supply) +
                       " (3se " + fmt(3.0 * mc.raw_stderr) + "), markovized " +
                       fmt(demo.markovized_supply) + " vs " + fmt(mc.markovized_supply) +
                       " (3se " + fmt(3.0 * mc.markovized_stderr) + ")"});
  }
  return out;
}

}  // namespace eb::verify
