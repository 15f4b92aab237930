#pragma once

// Reproducible generators. Every output is a pure function of (seed, params);
// std::mt19937_64 drives the draws.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

#include "superquad/bounds.hpp"
#include "superquad/errors.hpp"
#include "superquad/linalg.hpp"

namespace superquad {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a, used to give each suite its own seed stream.
inline std::uint64_t name_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ name_hash(stream)) + index);
}

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs of
/// R's diagonal moved into Q.
inline Matrix random_orthogonal(Index n, Rng& rng) {
  const Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

/// Q diag(lambda) Q^T with lambda uniform on [lo, hi].
inline SymmetricMatrix random_with_spectrum(Index n, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> uniform(lo, hi);
  Vector lambda(n);
  for (Index i = 0; i < n; ++i) lambda(i) = uniform(rng);
  const Matrix q = random_orthogonal(n, rng);
  return SymmetricMatrix(Matrix(q * lambda.asDiagonal() * q.transpose()));
}

inline void require_generator_params(Index n, double spread) {
  if (n < 1) throw ParameterError("dimension must be at least 1");
  if (!(spread > 0.0) || !std::isfinite(spread)) throw ParameterError("spread must be positive");
}

/// PSD with eigenvalues uniform on [0, spread]; negative rounding noise is
/// removed by clamping the spectrum.
inline SymmetricMatrix random_psd(Index n, std::uint64_t seed, double spread) {
  require_generator_params(n, spread);
  Rng rng(seed);
  const SymmetricMatrix m = random_with_spectrum(n, 0.0, spread, rng);
  return apply_function([](double t) { return std::max(t, 0.0); }, m);
}

/// Positive definite pair with eigenvalues in [spread/100, spread] and
/// sigma_min(a - b) >= gap, by rejection.
inline std::pair<SymmetricMatrix, SymmetricMatrix> random_pd_pair_invertible_diff(Index n, std::uint64_t seed,
                                                                                  double spread, double gap) {
  require_generator_params(n, spread);
  if (!(gap > 0.0)) throw ParameterError("gap must be positive");
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SymmetricMatrix a = random_with_spectrum(n, spread / 100.0, spread, rng);
    SymmetricMatrix b = random_with_spectrum(n, spread / 100.0, spread, rng);
    if (smallest_singular_value(a - b) >= gap) return {std::move(a), std::move(b)};
  }
  throw GenerationError("no pair with sigma_min(a - b) >= " + std::to_string(gap) + " after 1000 attempts");
}

/// Positive definite pair whose difference is definite: b = a + P (or a = b + P)
/// with lambda(P) in [gap, spread], so the spectrum of a - b stays on one side of
/// 0 and the reverse Jensen constants are finite.
inline std::pair<SymmetricMatrix, SymmetricMatrix> random_pd_pair_definite_diff(Index n, std::uint64_t seed,
                                                                                double spread, double gap) {
  require_generator_params(n, spread);
  if (!(gap > 0.0) || !(gap < spread)) throw ParameterError("gap must lie in (0, spread)");
  Rng rng(seed);
  SymmetricMatrix base = random_with_spectrum(n, spread / 100.0, spread, rng);
  SymmetricMatrix step = random_with_spectrum(n, gap, spread, rng);
  SymmetricMatrix top = base + step;
  if (std::bernoulli_distribution(0.5)(rng)) return {std::move(top), std::move(base)};
  return {std::move(base), std::move(top)};
}

/// C a Gaussian matrix scaled to ||C||_2 = 0.9 * u with u uniform on [0, 1],
/// D = (I - C^T C)^{1/2}.
inline PositiveMapCD random_unital_map(Index n, std::uint64_t seed) {
  if (n < 1) throw ParameterError("dimension must be at least 1");
  Rng rng(seed);
  Matrix c = gaussian_matrix(n, n, rng);
  const double scale = 0.9 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double norm = spectral_norm(c);
  c = norm > 0.0 ? Matrix(c * (scale / norm)) : Matrix(Matrix::Zero(n, n));
  const Matrix d = sqrt_psd(SymmetricMatrix(Matrix(Matrix::Identity(n, n) - c.transpose() * c))).matrix();
  PositiveMapCD map{c, d};
  map.validate();
  return map;
}

/// Contraction with ||C||_2 uniform on [0.1, 0.9].
inline Matrix random_contraction(Index n, Rng& rng) {
  Matrix c = gaussian_matrix(n, n, rng);
  const double target = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
  return c * (target / spectral_norm(c));
}

/// Normalized standard Gaussian.
inline Vector random_unit_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector x(n);
  do {
    for (Index i = 0; i < n; ++i) x(i) = normal(rng);
  } while (x.norm() == 0.0);
  return x / x.norm();
}

}  // namespace superquad
