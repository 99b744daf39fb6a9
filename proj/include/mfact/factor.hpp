#pragma once

#include <vector>

#include "mfact/core.hpp"

namespace mfact {

/// QR factorization by Householder reflections, normalized so that
/// diag(r) >= 0. Total on square matrices; for singular input only the
/// product q * r is determined, and q follows the reflector sign convention.
QRPair qr_factor(const DenseMatrix& a, const ToleranceConfig& cfg = {});

/// QR factorization by modified Gram-Schmidt (with one reorthogonalization
/// pass). Independent second kernel for invertible input; throws
/// SingularInput (with the column index) when a column collapses below
/// singularity_tol * (1 + ||a||).
QRPair qr_factor_mgs(const DenseMatrix& a, const ToleranceConfig& cfg = {});

/// a = l * l^T for symmetric positive semi-definite a.
///
/// Pivots within structural_tol * (1 + ||a||) of zero are clamped to zero;
/// the rest of that column must then vanish to the same tolerance. Throws
/// NotSymmetric, or NotPositiveSemiDefinite with the 1-based pivot index.
CholeskyFactor cholesky_factor(const DenseMatrix& a, const ToleranceConfig& cfg = {});

/// a = l * d * u by Gaussian elimination without pivoting. Throws
/// NotInDomainP with the 1-based index of the first pivot whose magnitude
/// is <= singularity_tol * (1 + ||a||).
LDUTriple ldu_factor(const DenseMatrix& a, const ToleranceConfig& cfg = {});

/// Determinants of the k x k leading principal submatrices, k = 1..n.
/// Cofactor expansion for k <= 4, partial-pivot elimination above; never
/// shares code with ldu_factor.
std::vector<double> leading_minor_dets(const DenseMatrix& a);

/// Determinant by Gaussian elimination with partial pivoting.
double determinant(const DenseMatrix& a);

}  // namespace mfact
