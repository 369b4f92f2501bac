#include "eb/sampling.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace eb::sampling {

namespace {

Matrix gaussian_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = normal(rng);
    }
  }
  return m;
}

}  // namespace

Matrix random_hurwitz(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> margin(0.3, 1.0);
  const Matrix g = gaussian_matrix(rng, n, n);
  const double max_re = Eigen::EigenSolver<Matrix>(g).eigenvalues().real().maxCoeff();
  return g - (max_re + margin(rng)) * Matrix::Identity(n, n);
}

Matrix random_gain(std::mt19937_64& rng, int n, int m) {
  for (;;) {
    const Matrix b = gaussian_matrix(rng, n, m);
    Eigen::JacobiSVD<Matrix> svd(b);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) >= 0.2 * sv(0)) {
      return b;
    }
  }
}

SpdMatrix random_spd(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> eig(lo, hi);
  const Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rng, n, n));
  const Matrix q = qr.householderQ();
  Vector lam(n);
  for (int i = 0; i < n; ++i) {
    lam(i) = eig(rng);
  }
  return SpdMatrix(q * lam.asDiagonal() * q.transpose());
}

Vector random_vector(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = normal(rng);
  }
  return v;
}

SystemModel random_model(std::mt19937_64& rng, int n) {
  const Matrix a = random_hurwitz(rng, n);
  const int m = n + static_cast<int>(rng() % 2);
  const Matrix b = random_gain(rng, n, m);
  const Vector mu = random_vector(rng, n, 1.0);
  return SystemModel(a, b, mu);
}

BridgeProblem random_bridge(std::mt19937_64& rng, int n, double t_lo, double t_hi) {
  std::uniform_real_distribution<double> horizon(t_lo, t_hi);
  SystemModel model = random_model(rng, n);
  const double T = horizon(rng);
  GaussianState sigma(random_vector(rng, n, 1.0), random_spd(rng, n, 0.3, 3.0));
  GaussianState theta(random_vector(rng, n, 1.0), random_spd(rng, n, 0.3, 3.0));
  return BridgeProblem(std::move(model), T, std::move(sigma), std::move(theta));
}

}  // namespace eb::sampling
