#pragma once

#include <cstdint>
#include <random>

#include "mfact/core.hpp"

namespace mfact {

/// Seeded generator whose output is fixed by the C++ standard
/// (std::mt19937_64 plus explicit bit-to-double conversion), so results do
/// not depend on the library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  }

  /// Uniform integer on [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(next() % (hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 mix of (master, stream): independent per-check streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Entries uniform on [-1, 1].
DenseMatrix random_matrix(Rng& rng, std::size_t n);
/// Product of random n x k and k x n factors (rank <= k).
DenseMatrix random_low_rank(Rng& rng, std::size_t n, std::size_t k);
/// m^T m + 1e-3 I with m random.
DenseMatrix random_spd(Rng& rng, std::size_t n);
/// Random symmetric matrix with entries uniform on [-1, 1].
DenseMatrix random_symmetric(Rng& rng, std::size_t n);
/// Upper triangular, off-diagonal uniform on [-1, 1], diagonal on [0.5, 2].
DenseMatrix random_upper_positive(Rng& rng, std::size_t n);
/// Random matrix rescaled to unit Hilbert-Schmidt norm.
DenseMatrix random_unit_direction(Rng& rng, std::size_t n);

}  // namespace mfact
