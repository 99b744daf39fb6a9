#include "mfact/factor.hpp"

#include <cmath>
#include <utility>

namespace mfact {

namespace {

double scale_of(const DenseMatrix& a) { return 1.0 + hs_norm(a); }

// Flips row i of r and column i of q wherever r(i,i) < 0; q * r unchanged.
void fix_signs(DenseMatrix& q, DenseMatrix& r) {
  const std::size_t n = r.n();
  for (std::size_t i = 0; i < n; ++i) {
    if (r(i, i) >= 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) r(i, j) = -r(i, j);
    for (std::size_t k = 0; k < n; ++k) q(k, i) = -q(k, i);
  }
}

double cofactor_det(const DenseMatrix& a, std::size_t k) {
  switch (k) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    default: {
      // Laplace expansion along the first row of the k x k leading block.
      double det = 0.0;
      for (std::size_t col = 0; col < k; ++col) {
        DenseMatrix minor(k - 1);
        for (std::size_t i = 1; i < k; ++i) {
          std::size_t jj = 0;
          for (std::size_t j = 0; j < k; ++j) {
            if (j == col) continue;
            minor(i - 1, jj++) = a(i, j);
          }
        }
        const double sign = (col % 2 == 0) ? 1.0 : -1.0;
        det += sign * a(0, col) * cofactor_det(minor, k - 1);
      }
      return det;
    }
  }
}

DenseMatrix leading_block(const DenseMatrix& a, std::size_t k) {
  DenseMatrix b(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) b(i, j) = a(i, j);
  return b;
}

}  // namespace

QRPair qr_factor(const DenseMatrix& a, const ToleranceConfig& cfg) {
  cfg.validate();
  const std::size_t n = a.n();
  DenseMatrix r(a);
  DenseMatrix q = DenseMatrix::identity(n);
  std::vector<double> v(n);

  for (std::size_t k = 0; k + 1 < n; ++k) {
    double below = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) below += r(i, k) * r(i, k);
    if (below == 0.0) continue;  // column already reduced

    const double x0 = r(k, k);
    const double norm = std::sqrt(x0 * x0 + below);
    // Reflect onto -sign(x0) * norm to avoid cancellation in v(k).
    const double alpha = (x0 >= 0.0) ? -norm : norm;
    v[k] = x0 - alpha;
    for (std::size_t i = k + 1; i < n; ++i) v[i] = r(i, k);
    const double vtv = v[k] * v[k] + below;

    // r <- H r, with H = I - 2 v v^T / (v^T v).
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i] * r(i, j);
      const double f = 2.0 * dot / vtv;
      for (std::size_t i = k; i < n; ++i) r(i, j) -= f * v[i];
    }
    // q <- q H.
    for (std::size_t row = 0; row < n; ++row) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += q(row, i) * v[i];
      const double f = 2.0 * dot / vtv;
      for (std::size_t i = k; i < n; ++i) q(row, i) -= f * v[i];
    }
    r(k, k) = alpha;
    for (std::size_t i = k + 1; i < n; ++i) r(i, k) = 0.0;
  }

  fix_signs(q, r);
  return QRPair(std::move(q), std::move(r));
}

QRPair qr_factor_mgs(const DenseMatrix& a, const ToleranceConfig& cfg) {
  cfg.validate();
  const std::size_t n = a.n();
  const double threshold = cfg.singularity_tol * scale_of(a);
  DenseMatrix q(a);
  DenseMatrix r(n);

  for (std::size_t k = 0; k < n; ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q(i, j) * q(i, k);
        r(j, k) += dot;
        for (std::size_t i = 0; i < n; ++i) q(i, k) -= dot * q(i, j);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, k) * q(i, k);
    norm = std::sqrt(norm);
    if (!(norm > threshold)) {
      throw Error(ErrorCode::SingularInput, "column is numerically dependent on its predecessors",
                  k + 1);
    }
    r(k, k) = norm;
    for (std::size_t i = 0; i < n; ++i) q(i, k) /= norm;
  }
  return QRPair(std::move(q), std::move(r));
}

CholeskyFactor cholesky_factor(const DenseMatrix& a, const ToleranceConfig& cfg) {
  cfg.validate();
  const double tol = cfg.structural_tol * scale_of(a);
  if (asymmetry(a) > tol) throw Error(ErrorCode::NotSymmetric, "Cholesky input is not symmetric");

  const std::size_t n = a.n();
  DenseMatrix l(n);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      column[i] = s;
    }

    if (pivot > tol) {
      const double d = std::sqrt(pivot);
      l(j, j) = d;
      for (std::size_t i = j + 1; i < n; ++i) l(i, j) = column[i] / d;
    } else if (pivot >= -tol) {
      // Semi-definite clamp: a zero pivot forces a zero column.
      for (std::size_t i = j + 1; i < n; ++i) {
        if (std::abs(column[i]) > tol) {
          throw Error(ErrorCode::NotPositiveSemiDefinite,
                      "zero pivot with non-zero column below it", j + 1);
        }
      }
    } else {
      throw Error(ErrorCode::NotPositiveSemiDefinite, "negative pivot", j + 1);
    }
  }
  return CholeskyFactor(std::move(l));
}

LDUTriple ldu_factor(const DenseMatrix& a, const ToleranceConfig& cfg) {
  cfg.validate();
  const std::size_t n = a.n();
  const double threshold = cfg.singularity_tol * scale_of(a);
  DenseMatrix work(a);
  DenseMatrix l = DenseMatrix::identity(n);
  DenseMatrix d(n);
  DenseMatrix u = DenseMatrix::identity(n);

  for (std::size_t k = 0; k < n; ++k) {
    const double pivot = work(k, k);
    if (!(std::abs(pivot) > threshold)) {
      throw Error(ErrorCode::NotInDomainP, "leading principal minor is singular", k + 1);
    }
    d(k, k) = pivot;
    for (std::size_t i = k + 1; i < n; ++i) l(i, k) = work(i, k) / pivot;
    for (std::size_t j = k + 1; j < n; ++j) u(k, j) = work(k, j) / pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double lik = l(i, k);
      for (std::size_t j = k + 1; j < n; ++j) work(i, j) -= lik * work(k, j);
    }
  }
  return LDUTriple(std::move(l), std::move(d), std::move(u));
}

double determinant(const DenseMatrix& a) {
  const std::size_t n = a.n();
  DenseMatrix w(a);
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(w(i, k)) > std::abs(w(p, k))) p = i;
    if (w(p, k) == 0.0) return 0.0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(w(k, j), w(p, j));
      det = -det;
    }
    det *= w(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = w(i, k) / w(k, k);
      for (std::size_t j = k + 1; j < n; ++j) w(i, j) -= f * w(k, j);
    }
  }
  return det;
}

std::vector<double> leading_minor_dets(const DenseMatrix& a) {
  std::vector<double> dets;
  dets.reserve(a.n());
  for (std::size_t k = 1; k <= a.n(); ++k) {
    dets.push_back(k <= 4 ? cofactor_det(a, k) : determinant(leading_block(a, k)));
  }
  return dets;
}

}  // namespace mfact
