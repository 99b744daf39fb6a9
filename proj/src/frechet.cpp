#include "mfact/frechet.hpp"

#include <cmath>
#include <utility>

namespace mfact {

namespace {

// Index of the first diagonal entry with |m(i,i)| <= threshold, 1-based; 0 if none.
std::size_t first_small_diagonal(const DenseMatrix& m, double threshold) {
  for (std::size_t i = 0; i < m.n(); ++i)
    if (!(std::abs(m(i, i)) > threshold)) return i + 1;
  return 0;
}

}  // namespace

DenseMatrix qr_derivative_apply(const DenseMatrix& q, const DenseMatrix& r, const QRTangent& tan,
                                const ToleranceConfig& cfg) {
  require_same_size(q, r, "QR derivative");
  require_same_size(q, tan.u, "QR derivative");
  if (hs_norm(tan.base_q - q) > cfg.structural_tol * (1.0 + hs_norm(q))) {
    throw Error(ErrorCode::BaseMismatch, "tangent is based at a different orthogonal factor");
  }
  return tan.u * r + q * tan.v;
}

QRTangent qr_derivative_solve(const DenseMatrix& q, const DenseMatrix& r, const DenseMatrix& e,
                              const ToleranceConfig& cfg) {
  cfg.validate();
  require_same_size(q, r, "QR derivative");
  require_same_size(q, e, "QR derivative");
  if (std::size_t k = first_small_diagonal(r, cfg.singularity_tol * (1.0 + hs_norm(r)))) {
    throw Error(ErrorCode::SingularR, "R has a vanishing diagonal entry", k);
  }
  // q^T e r^{-1} = s + t with s skew and t upper; then u = q s, v = t r.
  const DenseMatrix m = solve_upper_right(q.transpose() * e, r);
  auto [s, t] = split_skew_upper(m);
  return QRTangent(q * s, t * r, q);
}

DenseMatrix cholesky_derivative_apply(const DenseMatrix& l, const DenseMatrix& v) {
  require_same_size(l, v, "Cholesky derivative");
  if (!is_lower_triangular(v)) {
    throw Error(ErrorCode::ShapeError, "Cholesky tangent must be lower triangular");
  }
  const DenseMatrix lvt = l * v.transpose();
  return lvt + lvt.transpose();
}

DenseMatrix cholesky_derivative_solve(const DenseMatrix& l, const DenseMatrix& e,
                                      const ToleranceConfig& cfg) {
  cfg.validate();
  require_same_size(l, e, "Cholesky derivative");
  if (std::size_t k = first_small_diagonal(l, cfg.singularity_tol * (1.0 + hs_norm(l)))) {
    throw Error(ErrorCode::SingularL, "L has a vanishing diagonal entry", k);
  }
  if (asymmetry(e) > cfg.structural_tol * (1.0 + hs_norm(e))) {
    throw Error(ErrorCode::NotSymmetric, "Cholesky perturbation must be symmetric");
  }
  // l^{-1} e l^{-T} is symmetric in exact arithmetic; symmetrize away the
  // rounding of the two solves before the lower-triangular split.
  const DenseMatrix m = symmetrized(solve_lower_transposed_right(solve_lower_left(l, e), l));
  return lower_part(l * sym_to_lower(m, cfg));
}

DenseMatrix ldu_derivative_apply(const DenseMatrix& l, const DenseMatrix& d, const DenseMatrix& u,
                                 const LDUTangent& tan) {
  require_same_size(l, d, "LDU derivative");
  require_same_size(d, u, "LDU derivative");
  require_same_size(l, tan.a, "LDU derivative");
  return tan.a * d * u + l * tan.s * u + l * d * tan.b;
}

LDUTangent ldu_derivative_solve(const DenseMatrix& l, const DenseMatrix& d, const DenseMatrix& u,
                                const DenseMatrix& e, const ToleranceConfig& cfg) {
  cfg.validate();
  require_same_size(l, d, "LDU derivative");
  require_same_size(d, u, "LDU derivative");
  require_same_size(l, e, "LDU derivative");
  if (std::size_t k = first_small_diagonal(d, cfg.singularity_tol * (1.0 + hs_norm(d)))) {
    throw Error(ErrorCode::SingularD, "D has a vanishing diagonal entry", k);
  }
  const DenseMatrix m = solve_upper_right(solve_lower_left(l, e), u);
  auto [ml, md, mu] = split_lower_diag_upper(m);
  return LDUTangent(solve_diag_right(l * ml, d), std::move(md), solve_diag_left(d, mu * u));
}

}  // namespace mfact
