#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "eb/matfun.hpp"

using eb::Matrix;
using eb::SpdMatrix;
using eb::SquareMatrix;
using eb::SymMatrix;
using eb::Vector;
namespace matfun = eb::matfun;

namespace {

Matrix random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      m(r, c) = normal(rng);
    }
  }
  return m;
}

Matrix random_spd(std::mt19937_64& rng, int n, double lo = 0.3, double hi = 3.0) {
  const Matrix g = random_matrix(rng, n);
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  std::uniform_real_distribution<double> eig(lo, hi);
  Vector lam(n);
  for (int i = 0; i < n; ++i) {
    lam(i) = eig(rng);
  }
  return q * lam.asDiagonal() * q.transpose();
}

Matrix random_hurwitz(std::mt19937_64& rng, int n) {
  const Matrix g = random_matrix(rng, n);
  const double max_re = Eigen::EigenSolver<Matrix>(g).eigenvalues().real().maxCoeff();
  return g - (max_re + 0.5) * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("expm identity at t = 0") {
  std::mt19937_64 rng(7);
  const SquareMatrix a(random_matrix(rng, 4));
  const Matrix e = matfun::expm(a, 0.0).mat();
  CHECK((e - Matrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("expm of a nilpotent matrix terminates") {
  Matrix a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  const double t = 1.7;
  const Matrix e = matfun::expm(SquareMatrix(a), t).mat();
  Matrix expected(2, 2);
  expected << 1.0, t, 0.0, 1.0;
  CHECK((e - expected).norm() <= 1e-14);
}

TEST_CASE("expm scalar") {
  Matrix a(1, 1);
  a << -1.0;
  const Matrix e = matfun::expm(SquareMatrix(a), std::log(2.0)).mat();
  CHECK(e(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("expm semigroup property") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> time(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SquareMatrix a(random_matrix(rng, 3));
    const double s = time(rng);
    const double t = time(rng);
    const Matrix whole = matfun::expm(a, s + t).mat();
    const Matrix split = matfun::expm(a, s).mat() * matfun::expm(a, t).mat();
    CHECK((whole - split).norm() <= 1e-10 * whole.norm());
  }
}

TEST_CASE("expm rejects non-square input") {
  CHECK_THROWS_AS(SquareMatrix{Matrix::Zero(2, 3)}, eb::ValidationError);
}

TEST_CASE("sqrtm_spd on identity and diagonal") {
  const Matrix i3 = Matrix::Identity(3, 3);
  CHECK((matfun::sqrtm_spd(SpdMatrix(i3)).mat() - i3).norm() <= 1e-15);

  Matrix d(2, 2);
  d << 4.0, 0.0, 0.0, 9.0;
  Matrix expected(2, 2);
  expected << 2.0, 0.0, 0.0, 3.0;
  CHECK((matfun::sqrtm_spd(SpdMatrix(d)).mat() - expected).norm() <= 1e-13);
}

TEST_CASE("sqrtm_spd residual and idempotence") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix s = random_spd(rng, 4);
    const Matrix x = matfun::sqrtm_spd(SpdMatrix(s)).mat();
    CHECK((x * x - s).norm() <= 1e-12 * s.norm());
    const Matrix back = matfun::sqrtm_spd(SpdMatrix(x * x)).mat();
    CHECK((back - x).norm() <= 1e-10 * x.norm());
  }
}

TEST_CASE("non-positive-definite input is rejected at construction") {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  CHECK_THROWS_AS(SpdMatrix{bad}, eb::NotPositiveDefiniteError);
}

TEST_CASE("logdet_spd") {
  CHECK(matfun::logdet_spd(SpdMatrix(Matrix::Identity(4, 4))) == doctest::Approx(0.0));

  Matrix recip(2, 2);
  recip << 2.0, 0.0, 0.0, 0.5;
  CHECK(matfun::logdet_spd(SpdMatrix(recip)) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK(matfun::logdet_spd(SpdMatrix(2.0 * Matrix::Identity(3, 3))) ==
        doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("lyap_solve scalar structure") {
  const Matrix a = -Matrix::Identity(3, 3);
  const Matrix q = 2.0 * Matrix::Identity(3, 3);
  const Matrix x = matfun::lyap_solve(SquareMatrix(a), SymMatrix(q)).mat();
  CHECK((x - Matrix::Identity(3, 3)).norm() <= 1e-13);

  Matrix a1(1, 1);
  a1 << -1.0;
  Matrix q1(1, 1);
  q1 << 2.0;
  CHECK(matfun::lyap_solve(SquareMatrix(a1), SymMatrix(q1)).mat()(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("lyap_solve residual on random Hurwitz systems") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_hurwitz(rng, 4);
    const Matrix b = random_matrix(rng, 4);
    const Matrix q = b * b.transpose();
    const Matrix x = matfun::lyap_solve(SquareMatrix(a), SymMatrix(q)).mat();
    CHECK((a * x + x * a.transpose() + q).norm() <= 1e-10 * q.norm());
    // X inherits positive semidefiniteness from Q.
    CHECK(matfun::sym_eigenvalues(x).minCoeff() >= -1e-12 * x.norm());
  }
}

TEST_CASE("lyap_solve rejects a resonant spectrum") {
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, -1.0;  // eigenvalues sum to zero
  CHECK_THROWS_AS(matfun::lyap_solve(SquareMatrix(a), SymMatrix(Matrix::Identity(2, 2))),
                  eb::SolverError);
}

TEST_CASE("lyap_solve agrees with the truncated Gramian quadrature") {
  // Independent oracle: composite Simpson for int_0^t* e^{As} Q e^{A^T s} ds
  // using powers of one half-step propagator.
  std::mt19937_64 rng(19);
  const Matrix a = random_hurwitz(rng, 3);
  const Matrix b = random_matrix(rng, 3);
  const Matrix q = b * b.transpose();
  const Matrix x = matfun::lyap_solve(SquareMatrix(a), SymMatrix(q)).mat();

  const double max_re = Eigen::EigenSolver<Matrix>(a).eigenvalues().real().maxCoeff();
  const double t_star = 100.0 / std::abs(max_re);
  const int panels = 8192;
  const double h = t_star / panels;
  const Matrix half_step = matfun::expm_raw(0.5 * h * a);

  Matrix node = Matrix::Identity(3, 3);  // e^{A * 0}
  const auto integrand = [&](const Matrix& e) { return Matrix(e * q * e.transpose()); };
  Matrix acc = Matrix::Zero(3, 3);
  for (int p = 0; p < panels; ++p) {
    const Matrix left = integrand(node);
    node = half_step * node;
    const Matrix mid = integrand(node);
    node = half_step * node;
    const Matrix right = integrand(node);
    acc += (h / 6.0) * (left + 4.0 * mid + right);
  }
  CHECK((acc - x).norm() <= 1e-6 * x.norm());
}

TEST_CASE("chi frozen values") {
  CHECK(matfun::chi(2.0) == doctest::Approx(-3.0 - std::log(2.0)).epsilon(1e-14));
  CHECK(matfun::chi(6.0) == doctest::Approx(-5.0 - std::log(4.0)).epsilon(1e-14));
  // chi(8/9) enters the scalar benchmark supply.
  CHECK(matfun::chi(8.0 / 9.0) ==
        doctest::Approx(-2.2604563602035012).epsilon(1e-14));
  CHECK_THROWS_AS(matfun::chi(0.0), eb::ValidationError);
  CHECK_THROWS_AS(matfun::chi(-1.0), eb::ValidationError);
}

TEST_CASE("chi identity over (1, 10]") {
  for (int i = 1; i <= 100; ++i) {
    const double v = 1.0 + 9.0 * i / 100.0;
    const double lhs = matfun::chi((v - 1.0) * v);
    const double rhs = 1.0 - 2.0 * v - std::log(2.0 * (v - 1.0));
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("chi_prime frozen values and finite differences") {
  CHECK(matfun::chi_prime(2.0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(matfun::chi_prime(6.0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK_THROWS_AS(matfun::chi_prime(0.0), eb::ValidationError);

  {
    const double h = 1e-6;
    const double fd = (matfun::chi(0.01 + h) - matfun::chi(0.01 - h)) / (2.0 * h);
    CHECK(std::abs(fd - matfun::chi_prime(0.01)) <= 1e-8 * std::abs(matfun::chi_prime(0.01)));
  }
  for (double omega = 1e-3; omega <= 1e3; omega *= 10.0) {
    const double h = 1e-7 * std::max(1.0, omega);
    const double fd = (matfun::chi(omega + h) - matfun::chi(omega - h)) / (2.0 * h);
    CHECK(std::abs(fd - matfun::chi_prime(omega)) <=
          1e-8 * std::abs(matfun::chi_prime(omega)));
  }
}

TEST_CASE("chi_prime satisfies its defining ODE (lambda = 0, tau = -1)") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> log_omega(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double omega = std::pow(10.0, log_omega(rng));
    const double d = matfun::chi_prime(omega);
    CHECK(std::abs(d * (1.0 + omega * d) - 1.0) <= 1e-10);
  }
}

TEST_CASE("trace_chi_product scalar reductions") {
  Matrix one(1, 1);
  one << 1.0;
  CHECK(matfun::trace_chi_product(SpdMatrix(one), SpdMatrix(one)) ==
        doctest::Approx(-std::sqrt(5.0) - std::log(std::sqrt(5.0) - 1.0)).epsilon(1e-14));

  Matrix third(1, 1);
  third << 1.0 / 3.0;
  Matrix four_thirds(1, 1);
  four_thirds << 4.0 / 3.0;
  CHECK(matfun::trace_chi_product(SpdMatrix(third), SpdMatrix(four_thirds)) ==
        doctest::Approx(-5.0 / 3.0 - std::log(2.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("trace_chi_product matches a general eigensolver") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 8; ++trial) {
    const Matrix u = random_spd(rng, 3);
    const Matrix v = random_spd(rng, 3);
    const double traced = matfun::trace_chi_product(SpdMatrix(u), SpdMatrix(v));

    Eigen::EigenSolver<Matrix> es(u * v);
    double expected = 0.0;
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(es.eigenvalues()(i).imag()) <= 1e-10);
      expected += matfun::chi(es.eigenvalues()(i).real());
    }
    CHECK(traced == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("trace_chi_product rejects a dimension mismatch") {
  CHECK_THROWS_AS(matfun::trace_chi_product(SpdMatrix(Matrix::Identity(2, 2)),
                                            SpdMatrix(Matrix::Identity(3, 3))),
                  eb::ValidationError);
}

TEST_CASE("v_chiprime_v scalar reductions") {
  Matrix two(1, 1);
  two << 2.0;
  Matrix one(1, 1);
  one << 1.0;
  CHECK(matfun::v_chiprime_v(SpdMatrix(two), SpdMatrix(one)).mat()(0, 0) ==
        doctest::Approx(-1.0).epsilon(1e-14));

  Matrix six(1, 1);
  six << 6.0;
  CHECK(matfun::v_chiprime_v(SpdMatrix(one), SpdMatrix(six)).mat()(0, 0) ==
        doctest::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("v_chiprime_v is the directional derivative of trace_chi_product") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const Matrix u = random_spd(rng, 2);
    const Matrix v = random_spd(rng, 2);
    const Matrix grad = matfun::v_chiprime_v(SpdMatrix(u), SpdMatrix(v)).mat();

    Matrix direction = random_matrix(rng, 2);
    direction = 0.5 * (direction + direction.transpose());
    const double h = 1e-6;
    const double plus = matfun::trace_chi_product(SpdMatrix(u + h * direction), SpdMatrix(v));
    const double minus = matfun::trace_chi_product(SpdMatrix(u - h * direction), SpdMatrix(v));
    const double fd = (plus - minus) / (2.0 * h);
    const double analytic = (grad.transpose() * direction).trace();
    CHECK(std::abs(fd - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("Frechet derivative of Tr chi(Sigma) is chi'(Sigma)") {
  std::mt19937_64 rng(37);
  const Matrix sigma = random_spd(rng, 3);
  const SpdMatrix ident = SpdMatrix(Matrix::Identity(3, 3));
  const Matrix grad = matfun::v_chiprime_v(SpdMatrix(sigma), ident).mat();

  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      Matrix bump = Matrix::Zero(3, 3);
      if (i == j) {
        bump(i, i) = h;
      } else {
        bump(i, j) = 0.5 * h;
        bump(j, i) = 0.5 * h;
      }
      const double plus = matfun::trace_chi_product(SpdMatrix(sigma + bump), ident);
      const double minus = matfun::trace_chi_product(SpdMatrix(sigma - bump), ident);
      const double fd = (plus - minus) / (2.0 * h);
      CHECK(std::abs(fd - grad(i, j)) <= 1e-6 * std::max(1.0, std::abs(grad(i, j))));
    }
  }
}
