#include "mfact/random.hpp"

namespace mfact {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DenseMatrix random_matrix(Rng& rng, std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

DenseMatrix random_low_rank(Rng& rng, std::size_t n, std::size_t k) {
  DenseMatrix left(n);
  DenseMatrix right(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      left(i, j) = rng.uniform(-1.0, 1.0);
      right(j, i) = rng.uniform(-1.0, 1.0);
    }
  }
  return left * right;
}

DenseMatrix random_spd(Rng& rng, std::size_t n) {
  const DenseMatrix m = random_matrix(rng, n);
  return symmetrized(m.transpose() * m) + 1e-3 * DenseMatrix::identity(n);
}

DenseMatrix random_symmetric(Rng& rng, std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

DenseMatrix random_upper_positive(Rng& rng, std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = rng.uniform(0.5, 2.0);
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

DenseMatrix random_unit_direction(Rng& rng, std::size_t n) {
  DenseMatrix m = random_matrix(rng, n);
  const double norm = hs_norm(m);
  return norm > 0.0 ? (1.0 / norm) * m : DenseMatrix::identity(n);
}

}  // namespace mfact
