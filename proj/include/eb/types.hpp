#pragma once

#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "eb/errors.hpp"

namespace eb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace detail {

inline void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError(std::string(what) + ": expected a nonempty square matrix, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + ": entries must be finite");
  }
}

}  // namespace detail

/// Real square matrix with finite entries. Houses drifts and generic
/// intermediates such as e^{At}.
class SquareMatrix {
 public:
  explicit SquareMatrix(Matrix m) : m_(std::move(m)) {
    detail::require_square_finite(m_, "SquareMatrix");
  }

  const Matrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// Symmetric matrix; construction symmetrizes explicitly so that downstream
/// factorizations never see asymmetry drift.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& m) {
    detail::require_square_finite(m, "SymMatrix");
    m_ = 0.5 * (m + m.transpose());
  }

  const Matrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  static SymMatrix identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }

 private:
  Matrix m_;
};

/// Symmetric positive definite matrix; definiteness is checked by Cholesky
/// factorization at construction.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m) {
    detail::require_square_finite(m, "SpdMatrix");
    m_ = 0.5 * (m + m.transpose());
    Eigen::LLT<Matrix> llt(m_);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefiniteError("SpdMatrix: matrix is not positive definite");
    }
  }

  const Matrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  SymMatrix sym() const { return SymMatrix(m_); }

  static SpdMatrix identity(Eigen::Index n) { return SpdMatrix(Matrix::Identity(n, n)); }

 private:
  Matrix m_;
};

/// Gaussian state law N(alpha, Pi) with nonsingular covariance.
struct GaussianState {
  Vector alpha;
  SpdMatrix Pi;

  GaussianState(Vector mean, SpdMatrix cov) : alpha(std::move(mean)), Pi(std::move(cov)) {
    if (alpha.size() != Pi.dim()) {
      throw ValidationError("GaussianState: mean and covariance dimensions disagree");
    }
  }

  Eigen::Index n() const { return alpha.size(); }
};

}  // namespace eb
