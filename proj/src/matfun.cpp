#include "eb/matfun.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace eb::matfun {

namespace {

// Degree-13 Pade coefficients for exp (Higham 2005).
constexpr double kPade13Theta = 5.371920351148152;
constexpr double kPade13[14] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

void require_same_dim(const SpdMatrix& u, const SpdMatrix& v, const char* what) {
  if (u.dim() != v.dim()) {
    throw ValidationError(std::string(what) + ": dimension mismatch " +
                          std::to_string(u.dim()) + " vs " + std::to_string(v.dim()));
  }
}

Eigen::SelfAdjointEigenSolver<Matrix> spd_eigen(const Matrix& s, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) {
    throw SolverError(std::string(what) + ": symmetric eigensolver failed");
  }
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw NotPositiveDefiniteError(std::string(what) + ": matrix is not positive definite");
  }
  return es;
}

// Eigenvalues of the SPD product representative U^{1/2} V U^{1/2}, which is
// similar to UV and therefore carries its spectrum.
Vector product_spectrum(const SpdMatrix& u, const SpdMatrix& v, const char* what) {
  const Matrix us = spd_sqrt(u.mat());
  Matrix w = us * v.mat() * us;
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  if (es.info() != Eigen::Success) {
    throw SolverError(std::string(what) + ": symmetric eigensolver failed");
  }
  const Vector lam = es.eigenvalues();
  const double lam_max = lam.maxCoeff();
  if (lam.minCoeff() <= 1e-14 * lam_max) {
    throw PositivityViolationError(std::string(what) +
                                   ": product spectrum not strictly positive (upstream bug)");
  }
  return lam;
}

}  // namespace

Matrix expm_raw(Matrix a) {
  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();

  int squarings = 0;
  if (norm1 > kPade13Theta) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kPade13Theta)));
    a *= std::pow(2.0, -squarings);
  }

  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;

  const Matrix u = a * (a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2) +
                        kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 + kPade13[1] * ident);
  const Matrix v = a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2) +
                   kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 + kPade13[0] * ident;

  Matrix f = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) {
    f = f * f;
  }
  return f;
}

SquareMatrix expm(const SquareMatrix& a, double t) {
  if (!std::isfinite(t)) {
    throw ValidationError("expm: time must be finite");
  }
  if (t == 0.0) {
    return SquareMatrix(Matrix::Identity(a.dim(), a.dim()));
  }
  return SquareMatrix(expm_raw(t * a.mat()));
}

Matrix spd_sqrt(const Matrix& s) {
  const auto es = spd_eigen(s, "spd_sqrt");
  Matrix r = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
             es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

Matrix spd_inv_sqrt(const Matrix& s) {
  const auto es = spd_eigen(s, "spd_inv_sqrt");
  Matrix r = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

double spd_logdet(const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("spd_logdet: matrix is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Vector sym_eigenvalues(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw SolverError("sym_eigenvalues: symmetric eigensolver failed");
  }
  return es.eigenvalues();
}

SpdMatrix sqrtm_spd(const SpdMatrix& s) { return SpdMatrix(spd_sqrt(s.mat())); }

double logdet_spd(const SpdMatrix& s) { return spd_logdet(s.mat()); }

SymMatrix lyap_solve(const SquareMatrix& a, const SymMatrix& q) {
  if (a.dim() != q.dim()) {
    throw ValidationError("lyap_solve: dimension mismatch");
  }
  const Eigen::Index n = a.dim();
  const Matrix& am = a.mat();

  // vec(AX + XA^T) = (I (x) A + A (x) I) vec(X), column-major vec.
  Matrix kron = Matrix::Zero(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    kron.block(j * n, j * n, n, n) += am;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        kron(j * n + i, k * n + i) += am(j, k);
      }
    }
  }

  Vector rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    rhs.segment(j * n, n) = -q.mat().col(j);
  }
  const Vector xv = kron.partialPivLu().solve(rhs);

  Matrix x(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    x.col(j) = xv.segment(j * n, n);
  }
  x = 0.5 * (x + x.transpose());

  const double qnorm = q.mat().norm();
  const double residual = (am * x + x * am.transpose() + q.mat()).norm();
  if (!std::isfinite(residual) || residual > 1e-10 * std::max(qnorm, 1e-30)) {
    throw SolverError("lyap_solve: singular Kronecker system (A not Hurwitz or resonant)");
  }
  return SymMatrix(x);
}

double chi(double omega) {
  if (!(omega > 0.0)) {
    throw ValidationError("chi: omega must be positive");
  }
  const double s = std::sqrt(1.0 + 4.0 * omega);
  return -s - std::log(4.0 * omega / (s + 1.0));
}

double chi_prime(double omega) {
  if (!(omega > 0.0)) {
    throw ValidationError("chi_prime: omega must be positive");
  }
  return -(1.0 + std::sqrt(1.0 + 4.0 * omega)) / (2.0 * omega);
}

double trace_chi_product(const SpdMatrix& u, const SpdMatrix& v) {
  require_same_dim(u, v, "trace_chi_product");
  const Vector lam = product_spectrum(u, v, "trace_chi_product");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    acc += chi(lam(i));
  }
  return acc;
}

SymMatrix v_chiprime_v(const SpdMatrix& u, const SpdMatrix& v) {
  require_same_dim(u, v, "v_chiprime_v");
  const Matrix vs = spd_sqrt(v.mat());
  Matrix w = vs * u.mat() * vs;
  w = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  if (es.info() != Eigen::Success) {
    throw SolverError("v_chiprime_v: symmetric eigensolver failed");
  }
  const Vector lam = es.eigenvalues();
  const double lam_max = lam.maxCoeff();
  if (lam.minCoeff() <= 1e-14 * lam_max) {
    throw PositivityViolationError("v_chiprime_v: product spectrum not strictly positive");
  }
  Vector f(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    f(i) = chi_prime(lam(i));
  }
  const Matrix inner = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
  return SymMatrix(vs * inner * vs);
}

}  // namespace eb::matfun
