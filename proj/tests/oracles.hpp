#pragma once

// Test-only reference computations. None of these call into the kernels they
// are used to check.

#include <functional>

#include "mfact/core.hpp"

namespace mfact::oracle {

/// Determinant by the Leibniz permutation sum (n <= 8).
double leibniz_det(const DenseMatrix& a);

/// Inverse by Gauss-Jordan elimination with partial pivoting.
DenseMatrix gauss_jordan_inverse(const DenseMatrix& a);

/// Orthogonal polar factor by the Newton iteration x <- (x + x^{-T}) / 2.
DenseMatrix polar_by_inverse_newton(const DenseMatrix& m);

/// Central difference (f(a + h e) - f(a - h e)) / (2h) of a matrix-valued map.
DenseMatrix central_difference(const std::function<DenseMatrix(const DenseMatrix&)>& f,
                               const DenseMatrix& a, const DenseMatrix& e, double h);

/// Largest entrywise |a - b|.
double max_entry_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace mfact::oracle
