#pragma once

#include "eb/types.hpp"

namespace eb::matfun {

/// e^{At} by scaling-and-squaring with a degree-13 Pade approximant.
/// expm(A, 0) is the identity exactly; t may have any sign.
SquareMatrix expm(const SquareMatrix& A, double t);

/// Principal square root of a positive definite matrix.
SpdMatrix sqrtm_spd(const SpdMatrix& S);

/// ln det S as a sum of log Cholesky pivots; never forms det itself.
double logdet_spd(const SpdMatrix& S);

/// Solves A X + X A^T + Q = 0 by dense Kronecker vectorization.
/// Requires that no two eigenvalues of A sum to zero (Hurwitz suffices).
SymMatrix lyap_solve(const SquareMatrix& A, const SymMatrix& Q);

/// chi(w) = -sqrt(1+4w) - ln(sqrt(1+4w) - 1), w > 0, evaluated in the
/// cancellation-free form -sqrt(1+4w) - ln(4w / (sqrt(1+4w) + 1)).
double chi(double omega);

/// chi'(w) = -(1 + sqrt(1+4w)) / (2w), w > 0.
double chi_prime(double omega);

/// Tr chi(U V) for positive definite U, V, computed from the spectrum of the
/// symmetric similarity U^{1/2} V U^{1/2}. Eigenvalues at or below
/// 1e-14 * lambda_max raise PositivityViolationError.
double trace_chi_product(const SpdMatrix& U, const SpdMatrix& V);

/// V^{1/2} chi'(V^{1/2} U V^{1/2}) V^{1/2}: the symmetric representation of
/// V chi'(UV), i.e. the derivative of Tr chi(UV) with respect to U.
SymMatrix v_chiprime_v(const SpdMatrix& U, const SpdMatrix& V);

// Raw-Eigen working set shared across modules.

/// e^A for a raw square matrix.
Matrix expm_raw(Matrix A);

/// Principal square root of an SPD matrix given as raw storage.
Matrix spd_sqrt(const Matrix& S);

/// Inverse principal square root of an SPD matrix.
Matrix spd_inv_sqrt(const Matrix& S);

/// ln det of an SPD matrix given as raw storage.
double spd_logdet(const Matrix& S);

/// Ascending eigenvalues of a symmetric matrix.
Vector sym_eigenvalues(const Matrix& S);

}  // namespace eb::matfun
