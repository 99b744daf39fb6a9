#include "mfact/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace mfact {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "matrix entry is not finite");
  }
}

void require_positive_dimension(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::ShapeError, "matrix dimension must be positive");
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) { require_positive_dimension(n); }

DenseMatrix::DenseMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), data_(std::move(row_major)) {
  require_positive_dimension(n);
  if (data_.size() != n * n) {
    throw Error(ErrorCode::ShapeError, "expected " + std::to_string(n * n) + " entries, got " +
                                           std::to_string(data_.size()));
  }
  require_finite(data_);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()) {
  require_positive_dimension(n_);
  data_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) throw Error(ErrorCode::ShapeError, "matrix rows must form a square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  require_finite(data_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  require_finite(diag);
  DenseMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

std::vector<double> DenseMatrix::diag() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)(i, i);
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& rhs) {
  require_same_size(*this, rhs, "matrix sum");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& rhs) {
  require_same_size(*this, rhs, "matrix difference");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs += rhs; }
DenseMatrix operator-(DenseMatrix lhs, const DenseMatrix& rhs) { return lhs -= rhs; }
DenseMatrix operator-(DenseMatrix m) { return m *= -1.0; }
DenseMatrix operator*(double s, DenseMatrix m) { return m *= s; }

DenseMatrix operator*(const DenseMatrix& lhs, const DenseMatrix& rhs) {
  require_same_size(lhs, rhs, "matrix product");
  const std::size_t n = lhs.n();
  DenseMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double a = lhs(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

void require_same_size(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.n() != b.n()) {
    throw Error(ErrorCode::ShapeError, std::string(what) + ": dimension " + std::to_string(a.n()) +
                                           " vs " + std::to_string(b.n()));
  }
}

void ToleranceConfig::validate() const {
  if (!(structural_tol >= 0.0) || !std::isfinite(structural_tol))
    throw Error(ErrorCode::InvalidArgument, "structural_tol must be finite and >= 0");
  if (!(singularity_tol > 0.0) || !std::isfinite(singularity_tol))
    throw Error(ErrorCode::InvalidArgument, "singularity_tol must be finite and > 0");
  if (!(fd_step > 0.0) || !std::isfinite(fd_step))
    throw Error(ErrorCode::InvalidArgument, "fd_step must be finite and > 0");
}

double hs_norm(const DenseMatrix& m) {
  double sum = 0.0;
  for (double v : m.entries()) sum += v * v;
  return std::sqrt(sum);
}

double tuple_norm(std::initializer_list<const DenseMatrix*> parts) {
  double sum = 0.0;
  for (const DenseMatrix* p : parts) {
    const double v = hs_norm(*p);
    sum += v * v;
  }
  return std::sqrt(sum);
}

double max_abs(const DenseMatrix& m) {
  double best = 0.0;
  for (double v : m.entries()) best = std::max(best, std::abs(v));
  return best;
}

double trace(const DenseMatrix& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < m.n(); ++i) t += m(i, i);
  return t;
}

bool is_upper_triangular(const DenseMatrix& m) noexcept {
  for (std::size_t i = 1; i < m.n(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (m(i, j) != 0.0) return false;
  return true;
}

bool is_lower_triangular(const DenseMatrix& m) noexcept {
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = i + 1; j < m.n(); ++j)
      if (m(i, j) != 0.0) return false;
  return true;
}

bool is_diagonal(const DenseMatrix& m) noexcept {
  return is_upper_triangular(m) && is_lower_triangular(m);
}

double asymmetry(const DenseMatrix& m) { return hs_norm(m - m.transpose()); }

double orthogonality_defect(const DenseMatrix& m) {
  return hs_norm(m.transpose() * m - DenseMatrix::identity(m.n()));
}

double cond_estimate(const DenseMatrix& triangular) {
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < triangular.n(); ++i) {
    const double v = std::abs(triangular(i, i));
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& m) {
  const std::size_t n = m.n();
  DenseMatrix a = symmetrized(m);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= 1e-30 * (1.0 + hs_norm(a) * hs_norm(a))) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // a <- J^T a J with the (p,q) rotation.
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig = a.diag();
  std::sort(eig.begin(), eig.end());
  return eig;
}

DenseMatrix strictly_lower(const DenseMatrix& m) {
  DenseMatrix out(m.n());
  for (std::size_t i = 1; i < m.n(); ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = m(i, j);
  return out;
}

DenseMatrix strictly_upper(const DenseMatrix& m) {
  DenseMatrix out(m.n());
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = i + 1; j < m.n(); ++j) out(i, j) = m(i, j);
  return out;
}

DenseMatrix upper_part(const DenseMatrix& m) {
  DenseMatrix out(m.n());
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = i; j < m.n(); ++j) out(i, j) = m(i, j);
  return out;
}

DenseMatrix lower_part(const DenseMatrix& m) {
  DenseMatrix out(m.n());
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out(i, j) = m(i, j);
  return out;
}

DenseMatrix diagonal_part(const DenseMatrix& m) {
  DenseMatrix out(m.n());
  for (std::size_t i = 0; i < m.n(); ++i) out(i, i) = m(i, i);
  return out;
}

DenseMatrix symmetrized(const DenseMatrix& m) {
  DenseMatrix out(m.n());
  for (std::size_t i = 0; i < m.n(); ++i) {
    out(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < m.n(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

SkewUpperSplit split_skew_upper(const DenseMatrix& m) {
  const std::size_t n = m.n();
  DenseMatrix skew(n);
  DenseMatrix upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    upper(i, i) = m(i, i);
    for (std::size_t j = 0; j < i; ++j) {
      // Strictly lower entries belong to the skew part alone; their mirror
      // images are absorbed into the upper part.
      skew(i, j) = m(i, j);
      skew(j, i) = -m(i, j);
      upper(j, i) = m(j, i) + m(i, j);
    }
  }
  return {std::move(skew), std::move(upper)};
}

DenseMatrix sym_to_lower(const DenseMatrix& m, const ToleranceConfig& cfg) {
  if (asymmetry(m) > cfg.structural_tol * (1.0 + hs_norm(m))) {
    throw Error(ErrorCode::NotSymmetric, "sym_to_lower requires a symmetric matrix");
  }
  DenseMatrix x(m.n());
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = 0; j < i; ++j) x(i, j) = m(i, j);
    x(i, i) = 0.5 * m(i, i);
  }
  return x;
}

LowerDiagUpperSplit split_lower_diag_upper(const DenseMatrix& m) {
  return {strictly_lower(m), diagonal_part(m), strictly_upper(m)};
}

DenseMatrix solve_lower_left(const DenseMatrix& l, const DenseMatrix& b) {
  require_same_size(l, b, "lower solve");
  const std::size_t n = l.n();
  DenseMatrix x(b);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, col);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
      x(i, col) = s / l(i, i);
    }
  }
  return x;
}

DenseMatrix solve_lower_transposed_right(const DenseMatrix& b, const DenseMatrix& l) {
  // X l^T = b  <=>  l X^T = b^T.
  return solve_lower_left(l, b.transpose()).transpose();
}

DenseMatrix solve_upper_left(const DenseMatrix& u, const DenseMatrix& b) {
  require_same_size(u, b, "upper solve");
  const std::size_t n = u.n();
  DenseMatrix x(b);
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, col);
      for (std::size_t k = ii + 1; k < n; ++k) s -= u(ii, k) * x(k, col);
      x(ii, col) = s / u(ii, ii);
    }
  }
  return x;
}

DenseMatrix solve_upper_right(const DenseMatrix& b, const DenseMatrix& u) {
  require_same_size(u, b, "upper solve");
  const std::size_t n = u.n();
  DenseMatrix x(b);
  // Row by row: x_row * u = b_row, forward over columns.
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = x(row, j);
      for (std::size_t k = 0; k < j; ++k) s -= x(row, k) * u(k, j);
      x(row, j) = s / u(j, j);
    }
  }
  return x;
}

DenseMatrix solve_diag_left(const DenseMatrix& d, const DenseMatrix& b) {
  require_same_size(d, b, "diagonal solve");
  DenseMatrix x(b);
  for (std::size_t i = 0; i < d.n(); ++i)
    for (std::size_t j = 0; j < d.n(); ++j) x(i, j) /= d(i, i);
  return x;
}

DenseMatrix solve_diag_right(const DenseMatrix& b, const DenseMatrix& d) {
  require_same_size(d, b, "diagonal solve");
  DenseMatrix x(b);
  for (std::size_t i = 0; i < d.n(); ++i)
    for (std::size_t j = 0; j < d.n(); ++j) x(i, j) /= d(j, j);
  return x;
}

QRPair::QRPair(DenseMatrix q_in, DenseMatrix r_in)
    : q(std::move(q_in)), r(upper_part(r_in)) {
  require_same_size(q, r, "QR pair");
}

CholeskyFactor::CholeskyFactor(DenseMatrix l_in) : l(lower_part(l_in)) {}

LDUTriple::LDUTriple(DenseMatrix l_in, DenseMatrix d_in, DenseMatrix u_in)
    : l(strictly_lower(l_in)), d(diagonal_part(d_in)), u(strictly_upper(u_in)) {
  require_same_size(l, d, "LDU triple");
  require_same_size(d, u, "LDU triple");
  for (std::size_t i = 0; i < d.n(); ++i) {
    l(i, i) = 1.0;
    u(i, i) = 1.0;
    if (d(i, i) == 0.0) throw Error(ErrorCode::SingularD, "zero diagonal entry in D", i + 1);
  }
}

QRTangent::QRTangent(DenseMatrix u_in, DenseMatrix v_in, DenseMatrix base_q_in)
    : u(std::move(u_in)), v(upper_part(v_in)), base_q(std::move(base_q_in)) {
  require_same_size(u, v, "QR tangent");
  require_same_size(u, base_q, "QR tangent");
}

LDUTangent::LDUTangent(DenseMatrix a_in, DenseMatrix s_in, DenseMatrix b_in)
    : a(strictly_lower(a_in)), s(diagonal_part(s_in)), b(strictly_upper(b_in)) {
  require_same_size(a, s, "LDU tangent");
  require_same_size(s, b, "LDU tangent");
}

double hs_norm(const QRPair& f) { return tuple_norm({&f.q, &f.r}); }
double hs_norm(const CholeskyFactor& f) { return hs_norm(f.l); }
double hs_norm(const LDUTriple& f) { return tuple_norm({&f.l, &f.d, &f.u}); }

}  // namespace mfact
