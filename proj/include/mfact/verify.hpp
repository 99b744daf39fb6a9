#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mfact/core.hpp"

namespace mfact {

/// Outcome of one executable property. worst_violation is measured in the
/// same units as tolerance, so passed implies worst_violation <= tolerance.
struct CheckResult {
  std::string name;
  bool passed = true;
  int trials = 0;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::string detail;
};

void to_json(nlohmann::json& j, const CheckResult& r);

/// Which factorization-theorem clauses a check encodes.
struct CheckDoc {
  std::string_view name;
  std::string_view summary;
  std::vector<std::string_view> clauses;
};

std::span<const CheckDoc> check_catalog();

/// Every clause identifier that check_catalog() must cover exactly once.
std::span<const std::string_view> theorem_clauses();

// QR existence for every square matrix; uniqueness (Householder vs modified
// Gram-Schmidt agreement) for invertible ones.
CheckResult check_qr_existence_uniqueness(int trials, int n_max, std::uint64_t seed,
                                          const ToleranceConfig& cfg = {});
CheckResult check_qr_existence_uniqueness(std::span<const DenseMatrix> inputs,
                                          std::uint64_t seed = 0,
                                          const ToleranceConfig& cfg = {});

// ||q r|| = ||r|| for orthogonal q, plus the divergence probe r_k = k I.
CheckResult check_qr_properness_identity(int trials, int n_max, std::uint64_t seed,
                                         const ToleranceConfig& cfg = {});
CheckResult check_qr_properness_identity(std::span<const QRPair> pairs, std::uint64_t seed = 0,
                                         const ToleranceConfig& cfg = {});

// Reconstruction, uniqueness, positive diagonal and the trace bound
// ||l l^T||^2 >= tr(l l^T)^2 / n on symmetric positive definite input.
CheckResult check_cholesky_theorem(int trials, int n_max, std::uint64_t seed,
                                   const ToleranceConfig& cfg = {});
CheckResult check_cholesky_theorem(std::span<const DenseMatrix> inputs, std::uint64_t seed = 0,
                                   const ToleranceConfig& cfg = {});

inline constexpr int kBoundaryCases = 20;

// ldu_factor succeeds exactly when the minor-determinant oracle says every
// leading principal submatrix is invertible; on success det(A_k) equals the
// product of the first k pivots. The random form adds kBoundaryCases inputs
// with a singular leading block.
CheckResult check_ldu_domain_characterization(int trials, int n_max, std::uint64_t seed,
                                              const ToleranceConfig& cfg = {});
CheckResult check_ldu_domain_characterization(std::span<const DenseMatrix> inputs,
                                              std::uint64_t seed = 0,
                                              const ToleranceConfig& cfg = {});

std::vector<double> default_nonproperness_eps();

// Bounded inputs [[eps, 1], [1, 0]] with LDU factors of size ~1/eps.
CheckResult check_ldu_nonproperness(std::span<const double> eps_list,
                                    const ToleranceConfig& cfg = {});

// Round trip, structure, linearity, injectivity at zero and central finite
// differences for the three derivative solvers.
CheckResult check_derivative_isomorphisms(int trials, int n_max, std::uint64_t seed,
                                          const ToleranceConfig& cfg = {});

/// All six checks with their default trial counts. Deterministic in seed;
/// check failures are reported, never thrown.
std::vector<CheckResult> run_all(const ToleranceConfig& cfg, std::uint64_t seed);

nlohmann::json report_json(std::span<const CheckResult> results);

}  // namespace mfact
