#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "mfact/error.hpp"

namespace mfact {

/// Square dense matrix of doubles, row-major. Every constructor rejects
/// non-finite entries and a zero dimension.
class DenseMatrix {
 public:
  /// n x n zero matrix.
  explicit DenseMatrix(std::size_t n);
  DenseMatrix(std::size_t n, std::vector<double> row_major);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);

  std::size_t n() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }

  std::span<const double> entries() const noexcept { return data_; }
  std::vector<double> diag() const;

  DenseMatrix transpose() const;
  bool all_finite() const noexcept;

  DenseMatrix& operator+=(const DenseMatrix& rhs);
  DenseMatrix& operator-=(const DenseMatrix& rhs);
  DenseMatrix& operator*=(double s) noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs);
DenseMatrix operator-(DenseMatrix m);
DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs);
DenseMatrix operator*(double s, DenseMatrix m);

/// Throws ShapeError unless both operands have the same dimension.
void require_same_size(const DenseMatrix& a, const DenseMatrix& b, const char* what);

struct ToleranceConfig {
  /// Absolute, applied as structural_tol * (1 + ||A||_HS).
  double structural_tol = 1e-12;
  double singularity_tol = 1e-10;
  double fd_step = 1e-6;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Norms and structural predicates
// ---------------------------------------------------------------------------

/// Hilbert-Schmidt (Frobenius) norm.
double hs_norm(const DenseMatrix& m);

/// HS norm of a tuple of factors, sqrt(sum ||m_i||^2).
double tuple_norm(std::initializer_list<const DenseMatrix*> parts);

double max_abs(const DenseMatrix& m);
double trace(const DenseMatrix& m);

bool is_upper_triangular(const DenseMatrix& m) noexcept;
bool is_lower_triangular(const DenseMatrix& m) noexcept;
bool is_diagonal(const DenseMatrix& m) noexcept;

/// ||m - m^T||_HS.
double asymmetry(const DenseMatrix& m);
/// ||m^T m - I||_HS.
double orthogonality_defect(const DenseMatrix& m);

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending. Only the
/// symmetric part of m is used.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& m);

/// max|diag| / min|diag| of a triangular or diagonal factor; +inf when a
/// diagonal entry is zero.
double cond_estimate(const DenseMatrix& triangular);

DenseMatrix strictly_lower(const DenseMatrix& m);
DenseMatrix strictly_upper(const DenseMatrix& m);
DenseMatrix upper_part(const DenseMatrix& m);
DenseMatrix lower_part(const DenseMatrix& m);
DenseMatrix diagonal_part(const DenseMatrix& m);
DenseMatrix symmetrized(const DenseMatrix& m);

// ---------------------------------------------------------------------------
// Structural splittings
// ---------------------------------------------------------------------------

struct SkewUpperSplit {
  DenseMatrix skew;
  DenseMatrix upper;
};

/// Unique decomposition m = skew + upper with skew antisymmetric and upper
/// upper triangular. skew is exactly antisymmetric and upper has an exactly
/// zero strict lower part; each entry above the diagonal of upper carries
/// one rounded addition, m(j,i) + m(i,j).
SkewUpperSplit split_skew_upper(const DenseMatrix& m);

/// Unique lower triangular x with x + x^T = m, for symmetric m.
/// Throws NotSymmetric when ||m - m^T|| > structural_tol * (1 + ||m||).
DenseMatrix sym_to_lower(const DenseMatrix& m, const ToleranceConfig& cfg = {});

struct LowerDiagUpperSplit {
  DenseMatrix lower;
  DenseMatrix diag;
  DenseMatrix upper;
};

/// m = lower + diag + upper (strictly lower / diagonal / strictly upper).
LowerDiagUpperSplit split_lower_diag_upper(const DenseMatrix& m);

// ---------------------------------------------------------------------------
// Triangular and diagonal solves. None of these form an inverse.
// Zero pivots are the caller's responsibility.
// ---------------------------------------------------------------------------

/// X with l * X = b, l lower triangular.
DenseMatrix solve_lower_left(const DenseMatrix& l, const DenseMatrix& b);
/// X with X * l^T = b, l lower triangular.
DenseMatrix solve_lower_transposed_right(const DenseMatrix& b, const DenseMatrix& l);
/// X with u * X = b, u upper triangular.
DenseMatrix solve_upper_left(const DenseMatrix& u, const DenseMatrix& b);
/// X with X * u = b, u upper triangular.
DenseMatrix solve_upper_right(const DenseMatrix& b, const DenseMatrix& u);
/// d^{-1} * b for diagonal d.
DenseMatrix solve_diag_left(const DenseMatrix& d, const DenseMatrix& b);
/// b * d^{-1} for diagonal d.
DenseMatrix solve_diag_right(const DenseMatrix& b, const DenseMatrix& d);

// ---------------------------------------------------------------------------
// Factor containers. Constructors impose the structural zero pattern (and
// unit diagonals) exactly instead of trusting their inputs.
// ---------------------------------------------------------------------------

struct QRPair {
  DenseMatrix q;
  DenseMatrix r;

  QRPair(DenseMatrix q_in, DenseMatrix r_in);
};

struct CholeskyFactor {
  DenseMatrix l;

  explicit CholeskyFactor(DenseMatrix l_in);
};

struct LDUTriple {
  DenseMatrix l;
  DenseMatrix d;
  DenseMatrix u;

  /// Throws SingularD when a diagonal entry of d is exactly zero.
  LDUTriple(DenseMatrix l_in, DenseMatrix d_in, DenseMatrix u_in);
};

/// Tangent vector (u, v) at (q, r): q^T u skew, v upper triangular.
struct QRTangent {
  DenseMatrix u;
  DenseMatrix v;
  DenseMatrix base_q;

  QRTangent(DenseMatrix u_in, DenseMatrix v_in, DenseMatrix base_q_in);
};

/// Tangent (a, s, b) at an LDU triple: a strictly lower, s diagonal,
/// b strictly upper.
struct LDUTangent {
  DenseMatrix a;
  DenseMatrix s;
  DenseMatrix b;

  LDUTangent(DenseMatrix a_in, DenseMatrix s_in, DenseMatrix b_in);
};

/// Pair norm sqrt(||q||^2 + ||r||^2).
double hs_norm(const QRPair& f);
double hs_norm(const CholeskyFactor& f);
/// Triple norm sqrt(||l||^2 + ||d||^2 + ||u||^2).
double hs_norm(const LDUTriple& f);

}  // namespace mfact
