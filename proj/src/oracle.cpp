#include "eb/oracle.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Cholesky>

#include "eb/matfun.hpp"
#include "eb/philox.hpp"

namespace eb::oracle {

namespace {

struct Rollout {
  std::vector<Matrix> pi;  // L+1 states
  double cost;             // sum Tr(K Pi K^T) dt, no penalty
  double violation_sq;     // ||Pi_L - Theta||_F^2
};

// Forward Euler through Pi_{k+1} = Pi_k + dt (C(Pi_k) + B K_k Pi_k + Pi_k K_k^T B^T).
Rollout roll_forward(const SystemModel& model, const Matrix& sigma, const Matrix& theta,
                     const std::vector<Matrix>& gains, double dt) {
  Rollout r;
  r.pi.reserve(gains.size() + 1);
  r.pi.push_back(sigma);
  r.cost = 0.0;
  for (const Matrix& k : gains) {
    const Matrix& pi = r.pi.back();
    r.cost += (k * pi * k.transpose()).trace() * dt;
    const Matrix bk_pi = model.B() * k * pi;
    Matrix next = pi + dt * (model.A() * pi + pi * model.A().transpose() + model.D() + bk_pi +
                             bk_pi.transpose());
    r.pi.push_back(0.5 * (next + next.transpose()));
  }
  r.violation_sq = (r.pi.back() - theta).squaredNorm();
  return r;
}

// Adjoint sweep for the gradient of cost + rho * ||Pi_L - Theta||_F^2
// with respect to every gain.
std::vector<Matrix> roll_adjoint(const SystemModel& model, const Rollout& r, const Matrix& theta,
                                 const std::vector<Matrix>& gains, double dt, double rho) {
  const std::size_t L = gains.size();
  std::vector<Matrix> grad(L);
  Matrix lambda = 2.0 * rho * (r.pi.back() - theta);
  for (std::size_t k = L; k-- > 0;) {
    const Matrix& pi = r.pi[k];
    grad[k] = 2.0 * dt * (gains[k] * pi + model.B().transpose() * lambda * pi);
    const Matrix a_cl = model.A() + model.B() * gains[k];
    lambda += dt * (a_cl.transpose() * lambda + lambda * a_cl + gains[k].transpose() * gains[k]);
    lambda = 0.5 * (lambda + lambda.transpose());
  }
  return grad;
}

double stack_dot(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += (a[i].array() * b[i].array()).sum();
  }
  return s;
}

// Gradient descent with Barzilai-Borwein steps and an Armijo backtracking
// safeguard, for one penalty stage.
void minimize_stage(const SystemModel& model, const Matrix& sigma, const Matrix& theta,
                    std::vector<Matrix>& gains, double dt, double rho,
                    const TranscriptionConfig& cfg) {
  Rollout roll = roll_forward(model, sigma, theta, gains, dt);
  double obj = roll.cost + rho * roll.violation_sq;
  std::vector<Matrix> grad = roll_adjoint(model, roll, theta, gains, dt, rho);

  std::vector<Matrix> prev_gains;
  std::vector<Matrix> prev_grad;
  double step = 1e-3 / std::max(1.0, std::sqrt(stack_dot(grad, grad)));

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const double grad_norm_sq = stack_dot(grad, grad);
    if (std::sqrt(grad_norm_sq) <= cfg.grad_tol * (1.0 + std::abs(obj))) {
      return;
    }
    if (iter > 0) {
      // BB2 step: |s.y| / y.y from the last accepted move.
      double sy = 0.0;
      double yy = 0.0;
      for (std::size_t i = 0; i < gains.size(); ++i) {
        const Matrix s = gains[i] - prev_gains[i];
        const Matrix y = grad[i] - prev_grad[i];
        sy += (s.array() * y.array()).sum();
        yy += (y.array() * y.array()).sum();
      }
      if (yy > 0.0 && std::isfinite(sy / yy)) {
        step = std::clamp(std::abs(sy) / yy, 1e-12, 1e3);
      }
    }

    prev_gains = gains;
    prev_grad = grad;

    double trial_obj = 0.0;
    Rollout trial_roll;
    std::vector<Matrix> trial(gains.size());
    int bt = 0;
    for (; bt <= cfg.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < gains.size(); ++i) {
        trial[i] = gains[i] - step * grad[i];
      }
      trial_roll = roll_forward(model, sigma, theta, trial, dt);
      trial_obj = trial_roll.cost + rho * trial_roll.violation_sq;
      if (std::isfinite(trial_obj) &&
          trial_obj <= obj - cfg.armijo_c * step * grad_norm_sq) {
        break;
      }
      step *= cfg.backtrack_shrink;
    }
    if (bt > cfg.max_backtracks) {
      return;  // no further descent at double precision
    }
    gains.swap(trial);
    roll = std::move(trial_roll);
    obj = trial_obj;
    grad = roll_adjoint(model, roll, theta, gains, dt, rho);
  }
}

}  // namespace

double brute_force_cov_supply(const SystemModel& model, double T, const SpdMatrix& sigma,
                              const SpdMatrix& theta, const TranscriptionConfig& config) {
  if (model.n() > 3) {
    throw ConfigError("brute_force_cov_supply: oracle is desk-scale only (n <= 3)");
  }
  if (config.steps < 64) {
    throw ConfigError("brute_force_cov_supply: steps must be at least 64");
  }
  if (config.penalty_schedule.empty()) {
    throw ConfigError("brute_force_cov_supply: empty penalty schedule");
  }
  for (std::size_t i = 0; i + 1 < config.penalty_schedule.size(); ++i) {
    if (config.penalty_schedule[i] >= config.penalty_schedule[i + 1]) {
      throw ConfigError("brute_force_cov_supply: penalty schedule must be strictly increasing");
    }
  }
  if (config.penalty_schedule.front() <= 0.0) {
    throw ConfigError("brute_force_cov_supply: penalties must be positive");
  }
  if (!(T > 0.0)) {
    throw ValidationError("brute_force_cov_supply: T must be positive");
  }

  const double dt = T / config.steps;
  std::vector<Matrix> gains(config.steps, Matrix::Zero(model.m(), model.n()));
  for (const double rho : config.penalty_schedule) {
    minimize_stage(model, sigma.mat(), theta.mat(), gains, dt, rho, config);
  }

  const Rollout final_roll = roll_forward(model, sigma.mat(), theta.mat(), gains, dt);
  const double violation = std::sqrt(final_roll.violation_sq);
  if (!(violation <= config.terminal_tol)) {
    throw OracleFailureError(
        "brute_force_cov_supply: terminal condition missed, ||Pi_L - Theta||_F = " +
        std::to_string(violation) + " after the final penalty stage (cost " +
        std::to_string(final_roll.cost) + ")");
  }
  return final_roll.cost;
}

std::pair<double, std::vector<Vector>> brute_force_mean_controls(const SystemModel& model,
                                                                 double T, const Vector& alpha0,
                                                                 const Vector& alphaT, int L) {
  if (L < 256) {
    throw ConfigError("brute_force_mean_supply: L must be at least 256");
  }
  if (!(T > 0.0)) {
    throw ValidationError("brute_force_mean_supply: T must be positive");
  }
  const double dt = T / L;

  // Midpoint samples of e^{A s} B for s = dt/2, 3dt/2, ...; s = T - t_k.
  std::vector<Matrix> propagators(L);
  const Matrix step = matfun::expm_raw(dt * model.A());
  Matrix cur = matfun::expm_raw(0.5 * dt * model.A());
  Matrix discrete_gramian = Matrix::Zero(model.n(), model.n());
  for (int j = 0; j < L; ++j) {
    propagators[j] = cur;
    discrete_gramian += dt * cur * model.D() * cur.transpose();
    cur = step * cur;
  }

  const Vector reached = nominal::mean_semigroup(model, T, alpha0);
  const Vector residual = alphaT - reached;
  Eigen::LLT<Matrix> llt(0.5 * (discrete_gramian + discrete_gramian.transpose()));
  if (llt.info() != Eigen::Success) {
    throw SolverError("brute_force_mean_supply: discrete Gramian is rank deficient");
  }
  const Vector nu = llt.solve(residual);

  std::vector<Vector> controls(L);
  for (int k = 0; k < L; ++k) {
    // t_k = (k + 1/2) dt maps to s = T - t_k = (L - 1 - k + 1/2) dt.
    controls[k] = model.B().transpose() * propagators[L - 1 - k].transpose() * nu;
  }
  return {residual.dot(nu), std::move(controls)};
}

double brute_force_mean_supply(const SystemModel& model, double T, const Vector& alpha0,
                               const Vector& alphaT, int L) {
  return brute_force_mean_controls(model, T, alpha0, alphaT, L).first;
}

MarkovGapResult markovization_gap_demo(const SystemModel& model, double T, const Matrix& k,
                                       const SpdMatrix& sigma0) {
  const Eigen::Index n = model.n();
  if (k.rows() != model.m() || k.cols() != n) {
    throw ValidationError("markovization_gap_demo: gain k must be m x n");
  }
  if (sigma0.dim() != n) {
    throw ValidationError("markovization_gap_demo: Sigma0 has wrong dimension");
  }
  if (!(T > 0.0)) {
    throw ValidationError("markovization_gap_demo: T must be positive");
  }

  // Augmented covariance of (X_0, X_t): dS/dt = Aug S + S Aug^T + diag(0, D),
  // started at the rank-structured [[S0, S0], [S0, S0]].
  Matrix aug = Matrix::Zero(2 * n, 2 * n);
  aug.block(n, 0, n, n) = model.B() * k;
  aug.block(n, n, n, n) = model.A();
  Matrix noise = Matrix::Zero(2 * n, 2 * n);
  noise.block(n, n, n, n) = model.D();

  Matrix s(2 * n, 2 * n);
  s.block(0, 0, n, n) = sigma0.mat();
  s.block(0, n, n, n) = sigma0.mat();
  s.block(n, 0, n, n) = sigma0.mat();
  s.block(n, n, n, n) = sigma0.mat();

  const int steps = 2048;  // even, for Simpson weights
  const double dt = T / steps;
  const auto rhs = [&](const Matrix& cov) -> Matrix {
    Matrix d = aug * cov + cov * aug.transpose() + noise;
    return 0.5 * (d + d.transpose());
  };
  const auto conditioned = [&](const Matrix& cov) {
    const Matrix s0t = cov.block(0, n, n, n);
    const Matrix stt = cov.block(n, n, n, n);
    const Matrix pred = s0t * stt.llt().solve(s0t.transpose());
    return (k * pred * k.transpose()).trace();
  };

  std::vector<double> integrand(steps + 1);
  integrand[0] = conditioned(s);
  for (int j = 0; j < steps; ++j) {
    const Matrix k1 = rhs(s);
    const Matrix k2 = rhs(s + 0.5 * dt * k1);
    const Matrix k3 = rhs(s + 0.5 * dt * k2);
    const Matrix k4 = rhs(s + dt * k3);
    s += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s = 0.5 * (s + s.transpose());
    integrand[j + 1] = conditioned(s);
  }

  double simpson = integrand[0] + integrand[steps];
  for (int j = 1; j < steps; ++j) {
    simpson += (j % 2 == 1 ? 4.0 : 2.0) * integrand[j];
  }
  simpson *= dt / 3.0;

  MarkovGapResult out;
  out.raw_supply = 0.5 * T * (k * sigma0.mat() * k.transpose()).trace();
  out.markovized_supply = 0.5 * simpson;
  return out;
}

MarkovGapMcResult markovization_gap_mc(const SystemModel& model, double T, const Matrix& k,
                                       const SpdMatrix& sigma0, int paths, int steps,
                                       std::uint64_t seed) {
  const Eigen::Index n = model.n();
  const Eigen::Index m = model.m();
  if (paths < 100 || steps < 64) {
    throw ConfigError("markovization_gap_mc: needs paths >= 100 and steps >= 64");
  }
  const double dt = T / steps;
  const Matrix chol0 = sigma0.mat().llt().matrixL();

  // Record states at a coarse set of regression nodes, t = 0 included.
  const int node_stride = std::max(1, steps / 32);
  std::vector<int> nodes;
  for (int j = 0; j <= steps; j += node_stride) {
    nodes.push_back(j);
  }
  if (nodes.back() != steps) {
    nodes.push_back(steps);
  }

  Matrix h_all(m, paths);
  std::vector<Matrix> states(nodes.size(), Matrix(n, paths));
  Vector normals(std::max(n, m));
  Vector x(n);
  for (int i = 0; i < paths; ++i) {
    rng::fill_normals(seed, static_cast<std::uint64_t>(i), rng::kInitStep, normals.data(),
                      static_cast<int>(n));
    x = chol0 * normals.head(n);
    const Vector h = k * x;
    h_all.col(i) = h;
    std::size_t next_node = 0;
    for (int j = 0; j <= steps; ++j) {
      if (next_node < nodes.size() && nodes[next_node] == j) {
        states[next_node].col(i) = x;
        ++next_node;
      }
      if (j == steps) {
        break;
      }
      rng::fill_normals(seed, static_cast<std::uint64_t>(i), static_cast<std::uint32_t>(j),
                        normals.data(), static_cast<int>(m));
      x += (model.mu() + model.A() * x + model.B() * h) * dt +
           std::sqrt(dt) * (model.B() * normals.head(m));
    }
  }

  // Affine regression of h on X_t per node: fitted = [1; x]^T coeffs.
  Matrix fitted_sq(nodes.size(), paths);
  for (std::size_t nd = 0; nd < nodes.size(); ++nd) {
    Matrix design(paths, n + 1);
    design.col(0).setOnes();
    design.rightCols(n) = states[nd].transpose();
    const Matrix gram = design.transpose() * design;
    const Matrix rhs = design.transpose() * h_all.transpose();
    const Matrix coeffs = gram.ldlt().solve(rhs);  // (n+1) x m
    const Matrix fitted = design * coeffs;         // paths x m
    fitted_sq.row(nd) = fitted.rowwise().squaredNorm().transpose();
  }

  // Per-path trapezoid integrals over the regression nodes.
  Vector raw_path(paths);
  Vector mark_path(paths);
  for (int i = 0; i < paths; ++i) {
    raw_path(i) = 0.5 * T * h_all.col(i).squaredNorm();
    double acc = 0.0;
    for (std::size_t nd = 0; nd + 1 < nodes.size(); ++nd) {
      const double span = (nodes[nd + 1] - nodes[nd]) * dt;
      acc += 0.5 * (fitted_sq(nd, i) + fitted_sq(nd + 1, i)) * span;
    }
    mark_path(i) = 0.5 * acc;
  }

  const auto mean_stderr = [paths](const Vector& v) {
    const double mean = v.mean();
    const double var = (v.array() - mean).square().sum() / (paths - 1);
    return std::make_pair(mean, std::sqrt(var / paths));
  };
  const auto [raw_mean, raw_se] = mean_stderr(raw_path);
  const auto [mark_mean, mark_se] = mean_stderr(mark_path);
  return MarkovGapMcResult{raw_mean, raw_se, mark_mean, mark_se};
}

}  // namespace eb::oracle
