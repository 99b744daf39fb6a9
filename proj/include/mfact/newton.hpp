#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mfact/core.hpp"

namespace mfact {

inline constexpr int kDefaultMaxNewtonIters = 20;
inline constexpr int kDefaultPathSteps = 64;
inline constexpr int kMaxStepHalvings = 4;

/// Smooth one-parameter matrix family on [0, 1]. evaluate must be a pure
/// function of t and keep a fixed dimension.
struct PathSpec {
  std::function<DenseMatrix(double)> evaluate;
  int steps = kDefaultPathSteps;
  std::string description;
};

/// a(t) = (1 - t) a0 + t a1.
PathSpec linear_path(DenseMatrix a0, DenseMatrix a1, int steps = kDefaultPathSteps);

/// Piecewise-linear interpolation through samples placed at t = k / (m - 1).
/// Needs at least two samples of equal dimension.
PathSpec piecewise_linear_path(std::vector<DenseMatrix> samples, int steps = kDefaultPathSteps);

template <class Factors>
struct TrackReport {
  std::vector<double> ts;
  std::vector<Factors> factors;
  /// Corrector iterations at each sample (the largest over refined sub-steps).
  std::vector<int> newton_iters;
  /// Norm of the factor tuple at each sample; grows without bound as an
  /// LDU path approaches the boundary of its domain.
  std::vector<double> factor_norms;
  /// ||F(factors) - a(t)||_HS at each sample.
  std::vector<double> residuals;
  double max_residual = 0.0;
};

template <class Factors>
struct Correction {
  Factors factors;
  int iters = 0;
};

/// Orthogonal polar factor of m by Newton-Schulz iteration
/// x <- x (3I - x^T x) / 2. Throws TooFarFromGroup unless every eigenvalue
/// of m^T m lies within 0.5 of 1.
DenseMatrix retract_orthogonal(const DenseMatrix& m, const ToleranceConfig& cfg = {});

/// One Newton update of (q, r) toward q r = a, without convergence checks.
/// Throws SingularR or TooFarFromGroup from the solve and retraction.
QRPair qr_newton_step(const DenseMatrix& a, const QRPair& cur, const ToleranceConfig& cfg = {});

/// Newton iteration for q r = a starting from guess:
///   e = a - q r;  (u, v) = DF^{-1} e;  q <- retract(q + u);  r <- r + v.
/// Stops once ||e|| <= structural_tol * (1 + ||a||) and q is orthogonal to
/// structural_tol. Throws SingularR, NoConvergence, or ConvergedOutsideChart
/// (an iterate produced a negative diagonal entry in r).
Correction<QRPair> qr_newton_correct(const DenseMatrix& a, const QRPair& guess,
                                     const ToleranceConfig& cfg = {},
                                     int max_iters = kDefaultMaxNewtonIters);

/// Newton iteration for l l^T = a with the residual symmetrized before each
/// solve.
Correction<CholeskyFactor> cholesky_newton_correct(const DenseMatrix& a,
                                                   const CholeskyFactor& guess,
                                                   const ToleranceConfig& cfg = {},
                                                   int max_iters = kDefaultMaxNewtonIters);

/// Newton iteration for l d u = a. The stopping scale is
/// 1 + max(||a||, ||l|| ||d|| ||u||), since near the domain boundary the
/// factors grow far beyond the product and rounding in l d u grows with them.
Correction<LDUTriple> ldu_newton_correct(const DenseMatrix& a, const LDUTriple& guess,
                                         const ToleranceConfig& cfg = {},
                                         int max_iters = kDefaultMaxNewtonIters);

// Predictor-corrector continuation over t_i = i / steps. The start is
// factored directly; each later sample is predicted with the derivative
// solve on a(t_i) - a(t_{i-1}) and corrected by Newton. A step that fails to
// converge is retried with up to kMaxStepHalvings halvings. Throws
// PathLeavesDomain (with the offending t) or NoConvergence.

TrackReport<QRPair> track_qr(const PathSpec& path, const ToleranceConfig& cfg = {},
                             int max_iters = kDefaultMaxNewtonIters);
TrackReport<CholeskyFactor> track_cholesky(const PathSpec& path, const ToleranceConfig& cfg = {},
                                           int max_iters = kDefaultMaxNewtonIters);
TrackReport<LDUTriple> track_ldu(const PathSpec& path, const ToleranceConfig& cfg = {},
                                 int max_iters = kDefaultMaxNewtonIters);

}  // namespace mfact
