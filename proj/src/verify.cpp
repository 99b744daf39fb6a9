#include "mfact/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

#include "mfact/factor.hpp"
#include "mfact/frechet.hpp"
#include "mfact/random.hpp"

namespace mfact {

namespace {

constexpr double kReconstructionTol = 1e-10;
constexpr double kOrthogonalityTol = 1e-10;
constexpr double kQrAgreementTol = 1e-9;
constexpr double kNormIdentityTol = 1e-12;
constexpr double kCholeskyUniquenessTol = 1e-9;
constexpr double kHolderSlack = 1e-10;
constexpr double kLadderTol = 1e-8;
constexpr double kBlowupTol = 1e-6;
constexpr double kBlowupBand = 0.1;
constexpr double kRoundTripTol = 1e-9;
constexpr double kLinearityTol = 1e-10;
constexpr double kFiniteDifferenceTol = 5e-5;

constexpr std::uint64_t kStreamQr = 0;
constexpr std::uint64_t kStreamProperness = 1;
constexpr std::uint64_t kStreamCholesky = 2;
constexpr std::uint64_t kStreamLdu = 3;
constexpr std::uint64_t kStreamDerivative = 5;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Collects per-clause worst values against each clause's own tolerance.
// Every clause tolerance is <= the check's headline tolerance.
class Tally {
 public:
  explicit Tally(double headline) : headline_(headline) {}

  void clause(const std::string& what, double value, double tol) {
    if (std::isnan(value)) value = std::numeric_limits<double>::infinity();
    auto [it, inserted] = worst_.try_emplace(what, value);
    if (!inserted) it->second = std::max(it->second, value);
    worst_all_ = std::max(worst_all_, value);
    if (!(value <= tol) && first_failure_.empty()) {
      first_failure_ = what + "=" + format_double(value) + " > " + format_double(tol);
    }
  }

  void note(std::string text) {
    if (!notes_.empty()) notes_ += "; ";
    notes_ += std::move(text);
  }

  CheckResult finish(std::string name, int trials, std::uint64_t seed) const {
    CheckResult r;
    r.name = std::move(name);
    r.passed = first_failure_.empty();
    r.trials = trials;
    r.worst_violation = worst_all_;
    r.tolerance = headline_;
    r.seed = seed;
    std::string detail;
    for (const auto& [what, value] : worst_) {
      if (!detail.empty()) detail += "; ";
      detail += what + "=" + format_double(value);
    }
    if (!notes_.empty()) detail += (detail.empty() ? "" : "; ") + notes_;
    if (!first_failure_.empty()) detail += "; FAILED " + first_failure_;
    r.detail = std::move(detail);
    return r;
  }

 private:
  double headline_;
  double worst_all_ = 0.0;
  std::map<std::string, double> worst_;
  std::string notes_;
  std::string first_failure_;
};

double sum_of_squares(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.entries()) s += v * v;
  return s;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) { return max_abs(a - b); }

double min_diag(const DenseMatrix& m) {
  const auto d = m.diag();
  return *std::min_element(d.begin(), d.end());
}

constexpr std::array<std::string_view, 9> kClauses = {
    "qr.proper",
    "qr.analytic_diffeomorphism_onto_GL",
    "qr.existence_and_uniqueness",
    "cholesky.proper",
    "cholesky.analytic_diffeomorphism_onto_SPD",
    "cholesky.existence_and_uniqueness",
    "ldu.analytic_diffeomorphism_onto_P",
    "ldu.unique_factorization_on_P",
    "ldu.not_proper",
};

const std::vector<CheckDoc>& catalog() {
  static const std::vector<CheckDoc> docs = {
      {"qr_existence_uniqueness",
       "every square matrix has a QR factorization with non-negative diagonal; invertible "
       "matrices have exactly one with positive diagonal",
       {kClauses[2]}},
      {"qr_properness_identity",
       "||q r|| = ||r|| for orthogonal q, so unbounded factors give unbounded products",
       {kClauses[0]}},
      {"cholesky_theorem",
       "positive definite matrices factor uniquely as l l^T; ||l l^T||^2 >= tr(l l^T)^2 / n "
       "bounds the factor by the product",
       {kClauses[3], kClauses[5]}},
      {"ldu_domain_characterization",
       "an invertible matrix has an LDU factorization iff every leading principal submatrix "
       "is invertible, and det(A_k) = d_11 ... d_kk",
       {kClauses[7]}},
      {"ldu_nonproperness",
       "bounded matrices [[eps,1],[1,0]] have LDU factors growing like 1/eps",
       {kClauses[8]}},
      {"derivative_isomorphisms",
       "the derivative of each factorization map is invertible on the open domain and its "
       "inverse matches finite differences of the factorization",
       {kClauses[1], kClauses[4], kClauses[6]}},
  };
  return docs;
}

}  // namespace

void to_json(nlohmann::json& j, const CheckResult& r) {
  j = nlohmann::json{{"name", r.name},
                     {"passed", r.passed},
                     {"trials", r.trials},
                     {"worst_violation", r.worst_violation},
                     {"tolerance", r.tolerance},
                     {"seed", r.seed},
                     {"detail", r.detail}};
}

std::span<const CheckDoc> check_catalog() { return catalog(); }

std::span<const std::string_view> theorem_clauses() { return kClauses; }

// ---------------------------------------------------------------------------
// QR existence and uniqueness
// ---------------------------------------------------------------------------

CheckResult check_qr_existence_uniqueness(std::span<const DenseMatrix> inputs, std::uint64_t seed,
                                          const ToleranceConfig& cfg) {
  Tally tally(kQrAgreementTol);
  int invertible = 0;
  for (const DenseMatrix& a : inputs) {
    const double scale = 1.0 + hs_norm(a);
    const QRPair hh = qr_factor(a, cfg);
    tally.clause("reconstruction", hs_norm(hh.q * hh.r - a) / scale, kReconstructionTol);
    tally.clause("orthogonality", orthogonality_defect(hh.q), kOrthogonalityTol);
    tally.clause("negative_diagonal", std::max(0.0, -min_diag(hh.r)), cfg.structural_tol);
    tally.clause("lower_pattern", is_upper_triangular(hh.r) ? 0.0 : 1.0, 0.0);

    try {
      const QRPair gs = qr_factor_mgs(a, cfg);
      ++invertible;
      const double bound = scale * cond_estimate(hh.r);
      const double diff = std::max(max_abs_diff(hh.q, gs.q), max_abs_diff(hh.r, gs.r));
      tally.clause("kernel_disagreement", diff / bound, kQrAgreementTol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularInput) throw;
    }
  }
  tally.note("invertible=" + std::to_string(invertible) +
             " existence_only=" + std::to_string(inputs.size() - invertible));
  return tally.finish("qr_existence_uniqueness", static_cast<int>(inputs.size()), seed);
}

CheckResult check_qr_existence_uniqueness(int trials, int n_max, std::uint64_t seed,
                                          const ToleranceConfig& cfg) {
  Rng rng(seed);
  std::vector<DenseMatrix> inputs;
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = rng.index(1, static_cast<std::size_t>(n_max));
    if (t % 4 == 3 && n >= 2) {
      inputs.push_back(random_low_rank(rng, n, rng.index(1, n - 1)));
    } else {
      inputs.push_back(random_matrix(rng, n));
    }
  }
  return check_qr_existence_uniqueness(inputs, seed, cfg);
}

// ---------------------------------------------------------------------------
// QR properness identity
// ---------------------------------------------------------------------------

CheckResult check_qr_properness_identity(std::span<const QRPair> pairs, std::uint64_t seed,
                                         const ToleranceConfig& cfg) {
  (void)cfg;
  Tally tally(kNormIdentityTol);
  for (const QRPair& p : pairs) {
    const double nr = hs_norm(p.r);
    tally.clause("norm_identity", std::abs(hs_norm(p.q * p.r) - nr) / (1.0 + nr),
                 kNormIdentityTol);
  }
  if (!pairs.empty()) {
    // Divergence probe: ||q (k I)|| = k sqrt(n) strictly increases with k.
    const DenseMatrix& q = pairs.front().q;
    const std::size_t n = q.n();
    double previous = -1.0;
    bool increasing = true;
    for (int k = 1; k <= 10; ++k) {
      const double norm = hs_norm(q * (static_cast<double>(k) * DenseMatrix::identity(n)));
      increasing = increasing && norm > previous;
      previous = norm;
    }
    tally.clause("divergence_probe", increasing ? 0.0 : 1.0, 0.0);
  }
  return tally.finish("qr_properness_identity", static_cast<int>(pairs.size()), seed);
}

CheckResult check_qr_properness_identity(int trials, int n_max, std::uint64_t seed,
                                         const ToleranceConfig& cfg) {
  Rng rng(seed);
  std::vector<QRPair> pairs;
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = rng.index(1, static_cast<std::size_t>(n_max));
    DenseMatrix q = qr_factor(random_matrix(rng, n), cfg).q;
    DenseMatrix r = rng.uniform(0.1, 10.0) * random_upper_positive(rng, n);
    pairs.emplace_back(std::move(q), std::move(r));
  }
  return check_qr_properness_identity(pairs, seed, cfg);
}

// ---------------------------------------------------------------------------
// Cholesky
// ---------------------------------------------------------------------------

CheckResult check_cholesky_theorem(std::span<const DenseMatrix> inputs, std::uint64_t seed,
                                   const ToleranceConfig& cfg) {
  Tally tally(kCholeskyUniquenessTol);
  for (const DenseMatrix& a : inputs) {
    const std::size_t n = a.n();
    CholeskyFactor f = [&] {
      try {
        return cholesky_factor(a, cfg);
      } catch (const Error& e) {
        if (error_class(e.code()) != ErrorClass::Domain) throw;
        tally.clause("factorization_failed", 1.0, 0.0);
        return CholeskyFactor(DenseMatrix(n));
      }
    }();
    const DenseMatrix product = f.l * f.l.transpose();
    tally.clause("reconstruction", hs_norm(product - a) / (1.0 + hs_norm(a)), kReconstructionTol);
    tally.clause("nonpositive_diagonal", min_diag(f.l) > 0.0 ? 0.0 : 1.0 + std::abs(min_diag(f.l)),
                 0.0);

    // Uniqueness: factoring the recomposed product recovers the same factor.
    try {
      const CholeskyFactor again = cholesky_factor(symmetrized(product), cfg);
      tally.clause("refactor_disagreement", max_abs_diff(again.l, f.l) / (1.0 + hs_norm(f.l)),
                   kCholeskyUniquenessTol);
    } catch (const Error& e) {
      if (error_class(e.code()) != ErrorClass::Domain) throw;
      tally.clause("refactor_disagreement", 1.0, kCholeskyUniquenessTol);
    }

    const double tr = trace(product);
    tally.clause("trace_bound_excess",
                 std::max(0.0, tr * tr / static_cast<double>(n) - sum_of_squares(product)),
                 kHolderSlack);
  }
  return tally.finish("cholesky_theorem", static_cast<int>(inputs.size()), seed);
}

CheckResult check_cholesky_theorem(int trials, int n_max, std::uint64_t seed,
                                   const ToleranceConfig& cfg) {
  Rng rng(seed);
  std::vector<DenseMatrix> inputs;
  for (int t = 0; t < trials; ++t) {
    inputs.push_back(random_spd(rng, rng.index(1, static_cast<std::size_t>(n_max))));
  }
  return check_cholesky_theorem(inputs, seed, cfg);
}

// ---------------------------------------------------------------------------
// LDU domain
// ---------------------------------------------------------------------------

CheckResult check_ldu_domain_characterization(std::span<const DenseMatrix> inputs,
                                              std::uint64_t seed, const ToleranceConfig& cfg) {
  Tally tally(kLadderTol);
  int in_domain = 0;
  for (const DenseMatrix& a : inputs) {
    const std::vector<double> dets = leading_minor_dets(a);
    const double threshold = cfg.singularity_tol * (1.0 + hs_norm(a));

    // Oracle: the k-th pivot equals det(A_k) / det(A_{k-1}).
    std::size_t oracle_fail = 0;
    double previous = 1.0;
    for (std::size_t k = 0; k < dets.size(); ++k) {
      if (!(std::abs(dets[k]) > threshold * std::abs(previous))) {
        oracle_fail = k + 1;
        break;
      }
      previous = dets[k];
    }

    try {
      const LDUTriple f = ldu_factor(a, cfg);
      ++in_domain;
      tally.clause("oracle_disagreement", oracle_fail == 0 ? 0.0 : 1.0, 0.0);
      double product = 1.0;
      for (std::size_t k = 0; k < dets.size(); ++k) {
        product *= f.d(k, k);
        const double denom = std::max(std::abs(dets[k]), std::abs(product));
        tally.clause("ladder_relative_error", std::abs(dets[k] - product) / denom, kLadderTol);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotInDomainP) throw;
      const bool agrees = oracle_fail != 0 && e.index() == oracle_fail;
      tally.clause("oracle_disagreement", agrees ? 0.0 : 1.0, 0.0);
    }
  }
  tally.note("in_domain=" + std::to_string(in_domain) +
             " outside=" + std::to_string(inputs.size() - in_domain));
  return tally.finish("ldu_domain_characterization", static_cast<int>(inputs.size()), seed);
}

CheckResult check_ldu_domain_characterization(int trials, int n_max, std::uint64_t seed,
                                              const ToleranceConfig& cfg) {
  Rng rng(seed);
  std::vector<DenseMatrix> inputs;
  for (int t = 0; t < trials; ++t) {
    inputs.push_back(random_matrix(rng, rng.index(1, static_cast<std::size_t>(n_max))));
  }
  // Boundary cases: the k-th leading block gets a dependent last row.
  for (int t = 0; t < kBoundaryCases; ++t) {
    const std::size_t n = rng.index(2, static_cast<std::size_t>(std::max(2, n_max)));
    const std::size_t k = rng.index(1, n);
    DenseMatrix a = random_matrix(rng, n);
    std::vector<double> coeff(k - 1);
    for (double& c : coeff) c = rng.uniform(-1.0, 1.0);
    for (std::size_t j = 0; j < k; ++j) {
      double v = 0.0;
      for (std::size_t i = 0; i + 1 < k; ++i) v += coeff[i] * a(i, j);
      a(k - 1, j) = v;
    }
    inputs.push_back(std::move(a));
  }
  return check_ldu_domain_characterization(inputs, seed, cfg);
}

// ---------------------------------------------------------------------------
// LDU non-properness
// ---------------------------------------------------------------------------

std::vector<double> default_nonproperness_eps() { return {1e-1, 1e-2, 1e-3, 1e-4}; }

CheckResult check_ldu_nonproperness(std::span<const double> eps_list,
                                    const ToleranceConfig& cfg) {
  Tally tally(kBlowupTol);
  for (double eps : eps_list) {
    const DenseMatrix a{{eps, 1.0}, {1.0, 0.0}};
    tally.clause("input_norm_excess", std::max(0.0, hs_norm(a) - std::sqrt(2.0 + eps * eps)),
                 kBlowupTol);
    try {
      const LDUTriple f = ldu_factor(a, cfg);
      tally.clause("d22_scaled_error", std::abs(f.d(1, 1) + 1.0 / eps) * eps, kBlowupTol);
      if (eps <= 1e-2) {
        tally.clause("l_growth_band_excess",
                     std::max(0.0, std::abs(hs_norm(f.l) * eps - 1.0) - kBlowupBand), 0.0);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotInDomainP) throw;
      tally.clause("factorization_failed", 1.0, 0.0);
    }
  }
  return tally.finish("ldu_nonproperness", static_cast<int>(eps_list.size()), 0);
}

// ---------------------------------------------------------------------------
// Derivative isomorphisms
// ---------------------------------------------------------------------------

namespace {

struct DerivativeProbe {
  Tally& tally;
  const ToleranceConfig& cfg;
  Rng& rng;

  void qr(std::size_t n) {
    const DenseMatrix a = random_matrix(rng, n);
    const QRPair f = qr_factor(a, cfg);
    const double cond = cond_estimate(f.r);
    const DenseMatrix e = random_unit_direction(rng, n);
    const DenseMatrix e2 = random_unit_direction(rng, n);

    const QRTangent tan = qr_derivative_solve(f.q, f.r, e, cfg);
    tally.clause("qr.round_trip",
                 hs_norm(qr_derivative_apply(f.q, f.r, tan, cfg) - e) / ((1.0 + hs_norm(e)) * cond),
                 kRoundTripTol);
    const DenseMatrix qtu = f.q.transpose() * tan.u;
    tally.clause("qr.skewness", hs_norm(qtu + qtu.transpose()) / (1.0 + hs_norm(tan.u)),
                 kRoundTripTol);
    tally.clause("qr.v_lower_pattern", is_upper_triangular(tan.v) ? 0.0 : 1.0, 0.0);

    const QRTangent zero = qr_derivative_solve(f.q, f.r, DenseMatrix(n), cfg);
    tally.clause("qr.zero_injectivity", hs_norm(zero.u) + hs_norm(zero.v), 0.0);

    const double alpha = rng.uniform(-2.0, 2.0);
    const double beta = rng.uniform(-2.0, 2.0);
    const QRTangent t2 = qr_derivative_solve(f.q, f.r, e2, cfg);
    const QRTangent combo = qr_derivative_solve(f.q, f.r, alpha * e + beta * e2, cfg);
    const DenseMatrix du = combo.u - alpha * tan.u - beta * t2.u;
    const DenseMatrix dv = combo.v - alpha * tan.v - beta * t2.v;
    tally.clause("qr.linearity",
                 tuple_norm({&du, &dv}) / (1.0 + tuple_norm({&combo.u, &combo.v})),
                 kLinearityTol);

    const double h = cfg.fd_step;
    const QRPair plus = qr_factor(a + h * e, cfg);
    const QRPair minus = qr_factor(a - h * e, cfg);
    const double fd = std::max(max_abs_diff((0.5 / h) * (plus.q - minus.q), tan.u),
                               max_abs_diff((0.5 / h) * (plus.r - minus.r), tan.v));
    tally.clause("qr.finite_difference", fd / (cond * cond), kFiniteDifferenceTol);
  }

  void cholesky(std::size_t n) {
    const DenseMatrix a = random_spd(rng, n);
    const CholeskyFactor f = cholesky_factor(a, cfg);
    const double cond = cond_estimate(f.l);
    DenseMatrix e = random_symmetric(rng, n);
    e = (1.0 / hs_norm(e)) * e;
    DenseMatrix e2 = random_symmetric(rng, n);
    e2 = (1.0 / hs_norm(e2)) * e2;

    const DenseMatrix v = cholesky_derivative_solve(f.l, e, cfg);
    tally.clause("cholesky.round_trip",
                 hs_norm(cholesky_derivative_apply(f.l, v) - e) / ((1.0 + hs_norm(e)) * cond * cond),
                 kRoundTripTol);
    tally.clause("cholesky.v_upper_pattern", is_lower_triangular(v) ? 0.0 : 1.0, 0.0);
    tally.clause("cholesky.zero_injectivity",
                 hs_norm(cholesky_derivative_solve(f.l, DenseMatrix(n), cfg)), 0.0);

    const double alpha = rng.uniform(-2.0, 2.0);
    const double beta = rng.uniform(-2.0, 2.0);
    const DenseMatrix v2 = cholesky_derivative_solve(f.l, e2, cfg);
    const DenseMatrix combo = cholesky_derivative_solve(f.l, alpha * e + beta * e2, cfg);
    tally.clause("cholesky.linearity",
                 hs_norm(combo - alpha * v - beta * v2) / (1.0 + hs_norm(combo)), kLinearityTol);

    const double h = cfg.fd_step;
    const CholeskyFactor plus = cholesky_factor(a + h * e, cfg);
    const CholeskyFactor minus = cholesky_factor(a - h * e, cfg);
    const double fd = max_abs_diff((0.5 / h) * (plus.l - minus.l), v);
    tally.clause("cholesky.finite_difference", fd / (cond * cond), kFiniteDifferenceTol);
  }

  void ldu(std::size_t n) {
    DenseMatrix a = random_matrix(rng, n);
    std::optional<LDUTriple> f;
    while (!f) {
      try {
        f.emplace(ldu_factor(a, cfg));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotInDomainP) throw;
        a = random_matrix(rng, n);
      }
    }
    const double cond = cond_estimate(f->d);
    const DenseMatrix e = random_unit_direction(rng, n);
    const DenseMatrix e2 = random_unit_direction(rng, n);

    const LDUTangent tan = ldu_derivative_solve(f->l, f->d, f->u, e, cfg);
    tally.clause("ldu.round_trip",
                 hs_norm(ldu_derivative_apply(f->l, f->d, f->u, tan) - e) /
                     ((1.0 + hs_norm(e)) * cond),
                 kRoundTripTol);
    const LDUTangent zero = ldu_derivative_solve(f->l, f->d, f->u, DenseMatrix(n), cfg);
    tally.clause("ldu.zero_injectivity", hs_norm(zero.a) + hs_norm(zero.s) + hs_norm(zero.b),
                 0.0);

    const double alpha = rng.uniform(-2.0, 2.0);
    const double beta = rng.uniform(-2.0, 2.0);
    const LDUTangent t2 = ldu_derivative_solve(f->l, f->d, f->u, e2, cfg);
    const LDUTangent combo = ldu_derivative_solve(f->l, f->d, f->u, alpha * e + beta * e2, cfg);
    const DenseMatrix da = combo.a - alpha * tan.a - beta * t2.a;
    const DenseMatrix ds = combo.s - alpha * tan.s - beta * t2.s;
    const DenseMatrix db = combo.b - alpha * tan.b - beta * t2.b;
    tally.clause("ldu.linearity",
                 tuple_norm({&da, &ds, &db}) / (1.0 + tuple_norm({&combo.a, &combo.s, &combo.b})),
                 kLinearityTol);

    const double h = cfg.fd_step;
    const LDUTriple plus = ldu_factor(a + h * e, cfg);
    const LDUTriple minus = ldu_factor(a - h * e, cfg);
    const double fd = std::max({max_abs_diff((0.5 / h) * (plus.l - minus.l), tan.a),
                                max_abs_diff((0.5 / h) * (plus.d - minus.d), tan.s),
                                max_abs_diff((0.5 / h) * (plus.u - minus.u), tan.b)});
    tally.clause("ldu.finite_difference", fd / (cond * cond), kFiniteDifferenceTol);
  }
};

}  // namespace

CheckResult check_derivative_isomorphisms(int trials, int n_max, std::uint64_t seed,
                                          const ToleranceConfig& cfg) {
  Rng rng(seed);
  Tally tally(kFiniteDifferenceTol);
  DerivativeProbe probe{tally, cfg, rng};
  for (int t = 0; t < trials; ++t) {
    const std::size_t n = rng.index(1, static_cast<std::size_t>(n_max));
    probe.qr(n);
    probe.cholesky(n);
    probe.ldu(n);
  }
  return tally.finish("derivative_isomorphisms", trials, seed);
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> run_all(const ToleranceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::vector<double> eps = default_nonproperness_eps();
  return {
      check_qr_existence_uniqueness(200, 20, derive_seed(seed, kStreamQr), cfg),
      check_qr_properness_identity(200, 20, derive_seed(seed, kStreamProperness), cfg),
      check_cholesky_theorem(200, 20, derive_seed(seed, kStreamCholesky), cfg),
      check_ldu_domain_characterization(200, 20, derive_seed(seed, kStreamLdu), cfg),
      check_ldu_nonproperness(eps, cfg),
      check_derivative_isomorphisms(100, 10, derive_seed(seed, kStreamDerivative), cfg),
  };
}

nlohmann::json report_json(std::span<const CheckResult> results) {
  nlohmann::json checks = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    checks.push_back(r);
    all = all && r.passed;
  }
  return nlohmann::json{{"all_passed", all}, {"checks", std::move(checks)}};
}

}  // namespace mfact
