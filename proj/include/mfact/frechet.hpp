#pragma once

#include "mfact/core.hpp"

namespace mfact {

// Derivatives of the three factorization maps
//   QR:        F(q, r)    = q r        DF(u, v)    = u r + q v
//   Cholesky:  F(l)       = l l^T      DF(v)       = l v^T + v l^T
//   LDU:       F(l, d, u) = l d u      DF(a, s, b) = a d u + l s u + l d b
// Each *_apply evaluates DF on a tangent vector; each *_solve inverts DF,
// returning the unique tangent vector that DF maps onto a given matrix.

/// u r + q v. Throws BaseMismatch when tan.base_q differs from q by more
/// than structural_tol * (1 + ||q||).
DenseMatrix qr_derivative_apply(const DenseMatrix& q, const DenseMatrix& r, const QRTangent& tan,
                                const ToleranceConfig& cfg = {});

/// Tangent (u, v) at (q, r) with u r + q v = e. q^T u is skew-symmetric and
/// v upper triangular. Throws SingularR when some |r(i,i)| is at or below
/// singularity_tol * (1 + ||r||).
QRTangent qr_derivative_solve(const DenseMatrix& q, const DenseMatrix& r, const DenseMatrix& e,
                              const ToleranceConfig& cfg = {});

/// l v^T + v l^T. Throws ShapeError unless v is exactly lower triangular.
DenseMatrix cholesky_derivative_apply(const DenseMatrix& l, const DenseMatrix& v);

/// Lower triangular v with l v^T + v l^T = e. Throws SingularL or
/// NotSymmetric.
DenseMatrix cholesky_derivative_solve(const DenseMatrix& l, const DenseMatrix& e,
                                      const ToleranceConfig& cfg = {});

DenseMatrix ldu_derivative_apply(const DenseMatrix& l, const DenseMatrix& d, const DenseMatrix& u,
                                 const LDUTangent& tan);

/// Tangent (a, s, b) with a d u + l s u + l d b = e. Throws SingularD when
/// some |d(i,i)| is at or below singularity_tol * (1 + ||d||).
LDUTangent ldu_derivative_solve(const DenseMatrix& l, const DenseMatrix& d, const DenseMatrix& u,
                                const DenseMatrix& e, const ToleranceConfig& cfg = {});

}  // namespace mfact
