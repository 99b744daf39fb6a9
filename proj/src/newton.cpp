#include "mfact/newton.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "mfact/factor.hpp"
#include "mfact/frechet.hpp"

namespace mfact {

namespace {

constexpr int kMaxPolarIters = 60;

bool step_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::ConvergedOutsideChart:
    case ErrorCode::TooFarFromGroup:
    case ErrorCode::SingularR:
    case ErrorCode::SingularL:
    case ErrorCode::SingularD:
    case ErrorCode::NotSymmetric:
      return true;
    default:
      return false;
  }
}

struct QRKind {
  using Factors = QRPair;
  static constexpr const char* name = "QR";

  static Factors direct(const DenseMatrix& a, const ToleranceConfig& cfg) {
    return qr_factor(a, cfg);
  }
  static Factors predict(const Factors& f, const DenseMatrix& delta, const ToleranceConfig& cfg) {
    const QRTangent tan = qr_derivative_solve(f.q, f.r, delta, cfg);
    return QRPair(retract_orthogonal(f.q + tan.u, cfg), f.r + tan.v);
  }
  static Correction<Factors> correct(const DenseMatrix& a, const Factors& f,
                                     const ToleranceConfig& cfg, int max_iters) {
    return qr_newton_correct(a, f, cfg, max_iters);
  }
  static DenseMatrix product(const Factors& f) { return f.q * f.r; }
  static bool in_domain(const DenseMatrix& a, const Factors& f, const Factors*,
                        const ToleranceConfig& cfg) {
    const double threshold = cfg.singularity_tol * (1.0 + hs_norm(a));
    for (double v : f.r.diag())
      if (!(v > threshold)) return false;
    return true;
  }
};

struct CholeskyKind {
  using Factors = CholeskyFactor;
  static constexpr const char* name = "Cholesky";

  static Factors direct(const DenseMatrix& a, const ToleranceConfig& cfg) {
    return cholesky_factor(a, cfg);
  }
  static Factors predict(const Factors& f, const DenseMatrix& delta, const ToleranceConfig& cfg) {
    return CholeskyFactor(f.l + cholesky_derivative_solve(f.l, delta, cfg));
  }
  static Correction<Factors> correct(const DenseMatrix& a, const Factors& f,
                                     const ToleranceConfig& cfg, int max_iters) {
    return cholesky_newton_correct(a, f, cfg, max_iters);
  }
  static DenseMatrix product(const Factors& f) { return f.l * f.l.transpose(); }
  static bool in_domain(const DenseMatrix& a, const Factors& f, const Factors*,
                        const ToleranceConfig& cfg) {
    const double scale = 1.0 + hs_norm(a);
    if (asymmetry(a) > cfg.structural_tol * scale) return false;
    // Compare squared diagonal entries: they are the elimination pivots.
    for (double v : f.l.diag())
      if (!(v > 0.0 && v * v > cfg.singularity_tol * scale)) return false;
    return true;
  }
};

struct LDUKind {
  using Factors = LDUTriple;
  static constexpr const char* name = "LDU";

  static Factors direct(const DenseMatrix& a, const ToleranceConfig& cfg) {
    return ldu_factor(a, cfg);
  }
  static Factors predict(const Factors& f, const DenseMatrix& delta, const ToleranceConfig& cfg) {
    const LDUTangent tan = ldu_derivative_solve(f.l, f.d, f.u, delta, cfg);
    return LDUTriple(f.l + tan.a, f.d + tan.s, f.u + tan.b);
  }
  static Correction<Factors> correct(const DenseMatrix& a, const Factors& f,
                                     const ToleranceConfig& cfg, int max_iters) {
    return ldu_newton_correct(a, f, cfg, max_iters);
  }
  static DenseMatrix product(const Factors& f) { return f.l * f.d * f.u; }
  static bool in_domain(const DenseMatrix& a, const Factors& f, const Factors* prev,
                        const ToleranceConfig& cfg) {
    const double threshold = cfg.singularity_tol * (1.0 + hs_norm(a));
    for (std::size_t i = 0; i < f.d.n(); ++i) {
      const double v = f.d(i, i);
      if (!(std::abs(v) > threshold)) return false;
      // A pivot cannot change sign without passing through zero, i.e.
      // through a singular leading principal submatrix.
      if (prev != nullptr && std::signbit(v) != std::signbit(prev->d(i, i))) return false;
    }
    return true;
  }
};

template <class Kind>
bool direct_probe_in_domain(const DenseMatrix& a, const ToleranceConfig& cfg) {
  try {
    const auto f = Kind::direct(a, cfg);
    return Kind::in_domain(a, f, nullptr, cfg);
  } catch (const Error& e) {
    if (error_class(e.code()) == ErrorClass::Domain) return false;
    throw;
  }
}

DenseMatrix evaluate_checked(const PathSpec& path, double t, std::size_t n) {
  DenseMatrix a = path.evaluate(t);
  if (a.n() != n) {
    throw Error(ErrorCode::ShapeError, "path changed dimension along its parameter");
  }
  return a;
}

template <class Kind>
TrackReport<typename Kind::Factors> track(const PathSpec& path, const ToleranceConfig& cfg,
                                           int max_iters) {
  using Factors = typename Kind::Factors;
  cfg.validate();
  if (!path.evaluate) throw Error(ErrorCode::InvalidArgument, "path has no evaluate function");
  if (path.steps < 1) throw Error(ErrorCode::InvalidArgument, "path steps must be positive");
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be positive");

  TrackReport<Factors> report;
  auto record = [&](double t, const DenseMatrix& a, Factors f, int iters) {
    const double residual = hs_norm(Kind::product(f) - a);
    report.ts.push_back(t);
    report.factor_norms.push_back(hs_norm(f));
    report.residuals.push_back(residual);
    report.newton_iters.push_back(iters);
    report.factors.push_back(std::move(f));
    report.max_residual = std::max(report.max_residual, residual);
  };
  auto leaves = [](double t, const std::string& why) {
    return Error::at_parameter(ErrorCode::PathLeavesDomain, why, t);
  };

  DenseMatrix a_prev = path.evaluate(0.0);
  const std::size_t n = a_prev.n();
  std::optional<Factors> current;
  try {
    current.emplace(Kind::direct(a_prev, cfg));
  } catch (const Error& e) {
    if (error_class(e.code()) != ErrorClass::Domain) throw;
    throw leaves(0.0, std::string("start point: ") + e.what());
  }
  if (!Kind::in_domain(a_prev, *current, nullptr, cfg)) {
    throw leaves(0.0, std::string("start point is outside the ") + Kind::name + " domain");
  }
  record(0.0, a_prev, *current, 0);

  const double dt = 1.0 / path.steps;
  for (int i = 1; i <= path.steps; ++i) {
    const double t0 = (i - 1) * dt;
    const double t1 = (i == path.steps) ? 1.0 : i * dt;

    std::optional<Error> last_failure;
    double failed_at = t1;
    bool done = false;
    for (int halving = 0; halving <= kMaxStepHalvings && !done; ++halving) {
      const int substeps = 1 << halving;
      Factors f = *current;
      DenseMatrix a_from = a_prev;
      DenseMatrix a_to = a_prev;
      int iters = 0;
      double s = t0;
      try {
        for (int j = 1; j <= substeps; ++j) {
          s = (j == substeps) ? t1 : t0 + (t1 - t0) * j / substeps;
          a_to = evaluate_checked(path, s, n);
          Factors predicted = Kind::predict(f, a_to - a_from, cfg);
          Correction<Factors> corrected = Kind::correct(a_to, predicted, cfg, max_iters);
          if (!Kind::in_domain(a_to, corrected.factors, &f, cfg)) {
            throw leaves(s, std::string("tracked ") + Kind::name +
                                " factors reached the domain boundary");
          }
          iters = std::max(iters, corrected.iters);
          f = std::move(corrected.factors);
          a_from = a_to;
        }
        record(t1, a_to, f, iters);
        current = std::move(f);
        a_prev = std::move(a_to);
        done = true;
      } catch (const Error& e) {
        if (!step_failure(e.code())) throw;
        last_failure = e;
        failed_at = s;
      }
    }
    if (done) continue;

    const DenseMatrix a_fail = evaluate_checked(path, failed_at, n);
    if (last_failure->code() == ErrorCode::ConvergedOutsideChart ||
        !direct_probe_in_domain<Kind>(a_fail, cfg)) {
      throw leaves(failed_at, std::string("path is outside the ") + Kind::name +
                                  " domain: " + last_failure->what());
    }
    throw Error::at_parameter(ErrorCode::NoConvergence,
                              std::string("step failed after refinement: ") + last_failure->what(),
                              failed_at);
  }
  return report;
}

}  // namespace

PathSpec linear_path(DenseMatrix a0, DenseMatrix a1, int steps) {
  require_same_size(a0, a1, "linear path");
  PathSpec path;
  path.steps = steps;
  path.description = "linear interpolation between two endpoints";
  path.evaluate = [a0 = std::move(a0), a1 = std::move(a1)](double t) {
    return (1.0 - t) * a0 + t * a1;
  };
  return path;
}

PathSpec piecewise_linear_path(std::vector<DenseMatrix> samples, int steps) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "piecewise-linear path needs at least two samples");
  }
  for (const auto& m : samples) require_same_size(samples.front(), m, "piecewise-linear path");
  PathSpec path;
  path.steps = steps;
  path.description = "piecewise-linear interpolation through " + std::to_string(samples.size()) +
                     " samples";
  path.evaluate = [samples = std::move(samples)](double t) {
    const double segments = static_cast<double>(samples.size() - 1);
    const double x = std::clamp(t, 0.0, 1.0) * segments;
    const std::size_t k = std::min(static_cast<std::size_t>(x), samples.size() - 2);
    const double w = x - static_cast<double>(k);
    return (1.0 - w) * samples[k] + w * samples[k + 1];
  };
  return path;
}

DenseMatrix retract_orthogonal(const DenseMatrix& m, const ToleranceConfig& cfg) {
  cfg.validate();
  const std::size_t n = m.n();
  if (orthogonality_defect(m) <= cfg.structural_tol) return m;

  const std::vector<double> eig = symmetric_eigenvalues(m.transpose() * m);
  if (std::abs(eig.front() - 1.0) > 0.5 || std::abs(eig.back() - 1.0) > 0.5) {
    throw Error(ErrorCode::TooFarFromGroup,
                "singular values of the input are too far from 1 for the polar iteration");
  }

  const DenseMatrix three = 3.0 * DenseMatrix::identity(n);
  DenseMatrix x = m;
  for (int it = 0; it < kMaxPolarIters; ++it) {
    x = 0.5 * (x * (three - x.transpose() * x));
    if (orthogonality_defect(x) <= cfg.structural_tol) return x;
  }
  throw Error(ErrorCode::NoConvergence, "polar iteration did not reach the orthogonal group");
}

QRPair qr_newton_step(const DenseMatrix& a, const QRPair& cur, const ToleranceConfig& cfg) {
  const QRTangent tan = qr_derivative_solve(cur.q, cur.r, a - cur.q * cur.r, cfg);
  return QRPair(retract_orthogonal(cur.q + tan.u, cfg), cur.r + tan.v);
}

Correction<QRPair> qr_newton_correct(const DenseMatrix& a, const QRPair& guess,
                                     const ToleranceConfig& cfg, int max_iters) {
  cfg.validate();
  require_same_size(a, guess.q, "QR Newton");
  const double tol = cfg.structural_tol * (1.0 + hs_norm(a));
  QRPair cur = guess;
  for (int iters = 0;; ++iters) {
    const DenseMatrix e = a - cur.q * cur.r;
    if (hs_norm(e) <= tol && orthogonality_defect(cur.q) <= cfg.structural_tol) {
      return {std::move(cur), iters};
    }
    if (iters >= max_iters) {
      throw Error(ErrorCode::NoConvergence,
                  "QR Newton residual still above tolerance after " + std::to_string(iters) +
                      " iterations");
    }
    cur = qr_newton_step(a, cur, cfg);
    for (std::size_t i = 0; i < cur.r.n(); ++i) {
      if (cur.r(i, i) < 0.0) {
        throw Error(ErrorCode::ConvergedOutsideChart, "R acquired a negative diagonal entry",
                    i + 1);
      }
    }
  }
}

Correction<CholeskyFactor> cholesky_newton_correct(const DenseMatrix& a,
                                                   const CholeskyFactor& guess,
                                                   const ToleranceConfig& cfg, int max_iters) {
  cfg.validate();
  require_same_size(a, guess.l, "Cholesky Newton");
  const double tol = cfg.structural_tol * (1.0 + hs_norm(a));
  CholeskyFactor cur = guess;
  for (int iters = 0;; ++iters) {
    const DenseMatrix e = symmetrized(a - cur.l * cur.l.transpose());
    if (hs_norm(e) <= tol) return {std::move(cur), iters};
    if (iters >= max_iters) {
      throw Error(ErrorCode::NoConvergence,
                  "Cholesky Newton residual still above tolerance after " +
                      std::to_string(iters) + " iterations");
    }
    cur = CholeskyFactor(cur.l + cholesky_derivative_solve(cur.l, e, cfg));
    for (std::size_t i = 0; i < cur.l.n(); ++i) {
      if (cur.l(i, i) < 0.0) {
        throw Error(ErrorCode::ConvergedOutsideChart, "L acquired a negative diagonal entry",
                    i + 1);
      }
    }
  }
}

Correction<LDUTriple> ldu_newton_correct(const DenseMatrix& a, const LDUTriple& guess,
                                         const ToleranceConfig& cfg, int max_iters) {
  cfg.validate();
  require_same_size(a, guess.d, "LDU Newton");
  const double norm_a = hs_norm(a);
  LDUTriple cur = guess;
  for (int iters = 0;; ++iters) {
    const DenseMatrix e = a - cur.l * cur.d * cur.u;
    const double factor_scale = hs_norm(cur.l) * hs_norm(cur.d) * hs_norm(cur.u);
    if (hs_norm(e) <= cfg.structural_tol * (1.0 + std::max(norm_a, factor_scale))) {
      return {std::move(cur), iters};
    }
    if (iters >= max_iters) {
      throw Error(ErrorCode::NoConvergence,
                  "LDU Newton residual still above tolerance after " + std::to_string(iters) +
                      " iterations");
    }
    const LDUTangent tan = ldu_derivative_solve(cur.l, cur.d, cur.u, e, cfg);
    cur = LDUTriple(cur.l + tan.a, cur.d + tan.s, cur.u + tan.b);
  }
}

TrackReport<QRPair> track_qr(const PathSpec& path, const ToleranceConfig& cfg, int max_iters) {
  return track<QRKind>(path, cfg, max_iters);
}

TrackReport<CholeskyFactor> track_cholesky(const PathSpec& path, const ToleranceConfig& cfg,
                                           int max_iters) {
  return track<CholeskyKind>(path, cfg, max_iters);
}

TrackReport<LDUTriple> track_ldu(const PathSpec& path, const ToleranceConfig& cfg,
                                 int max_iters) {
  return track<LDUKind>(path, cfg, max_iters);
}

}  // namespace mfact
