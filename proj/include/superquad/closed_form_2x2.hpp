#pragma once

// Eigensolver-free arithmetic for symmetric 2x2 matrices: eigenvalues from the
// characteristic polynomial and f(A) from Sylvester's formula. Used as a second,
// independent computation path for the 2x2 reference examples.

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace superquad::closed_form {

using M2 = Eigen::Matrix2d;

/// Descending: mean +- sqrt(((a - c)/2)^2 + b^2).
inline std::array<double, 2> eigenvalues(const M2& m) {
  const double mean = 0.5 * (m(0, 0) + m(1, 1));
  const double radius = std::hypot(0.5 * (m(0, 0) - m(1, 1)), 0.5 * (m(0, 1) + m(1, 0)));
  return {mean + radius, mean - radius};
}

/// f(A) = f(l1) (A - l2 I)/(l1 - l2) + f(l2) (A - l1 I)/(l2 - l1), or f(l) I when
/// the eigenvalues coincide.
template <class F>
M2 apply(F&& f, const M2& m) {
  const auto [l1, l2] = eigenvalues(m);
  const M2 id = M2::Identity();
  if (l1 - l2 <= 1e-14 * std::max(1.0, std::abs(l1))) return f(0.5 * (l1 + l2)) * id;
  const M2 sym = 0.5 * (m + m.transpose());
  return f(l1) * (sym - l2 * id) / (l1 - l2) + f(l2) * (sym - l1 * id) / (l2 - l1);
}

inline M2 power(const M2& m, double q) {
  return apply([q](double t) { return std::pow(std::max(t, 0.0), q); }, m);
}

inline M2 abs_power(const M2& m, double q) {
  return apply([q](double t) { return std::pow(std::abs(t), q); }, m);
}

inline double spread(const M2& m) {
  const auto [l1, l2] = eigenvalues(m);
  return l1 - l2;
}

}  // namespace superquad::closed_form
