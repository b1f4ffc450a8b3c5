#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace scamscript {

// Standard distributions are implementation-defined across standard
// libraries; these helpers keep seeded output identical everywhere.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n > 0 (Lemire-style rejection).
inline std::size_t uniform_below(Rng& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % bound);
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_below(rng, i)]);
  }
}

/// Samples an index from unnormalized nonnegative weights.
template <typename Derived>
Eigen::Index sample_categorical(const Eigen::DenseBase<Derived>& weights, Rng& rng) {
  const double total = static_cast<double>(weights.sum());
  double u = uniform01(rng) * total;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    u -= static_cast<double>(weights(i));
    if (u < 0) return i;
  }
  // Round-off: fall back to the last positive weight.
  for (Eigen::Index i = weights.size() - 1; i > 0; --i) {
    if (weights(i) > 0) return i;
  }
  return 0;
}

/// Draw from Dirichlet(1, ..., 1): normalized unit exponentials.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dirichlet_flat(Eigen::Index size, Rng& rng) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    v(i) = static_cast<Scalar>(-std::log1p(-uniform01(rng)));
  }
  return v / v.sum();
}

}  // namespace scamscript
