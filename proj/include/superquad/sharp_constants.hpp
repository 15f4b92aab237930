#pragma once

// Sharp reverse-Jensen constants. For a strictly convex g on [m, M] with secant
// t -> mu t + nu, the constant gamma(m, M, g) = (mu t0 + nu) / g(t0) where t0
// solves mu g(t) = g'(t) (mu t + nu). For g(t) = t^p this is the generalized
// Kantorovich constant.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "superquad/errors.hpp"

namespace superquad {

template <class G>
concept SmoothFunction = requires(const G& g, double t) {
  { g.value(t) } -> std::convertible_to<double>;
  { g.derivative(t) } -> std::convertible_to<double>;
  { g.second_derivative(t) } -> std::convertible_to<double>;
  { g.smooth_at_zero() } -> std::convertible_to<bool>;
};

/// t^p on (0, inf).
struct PowerFunction {
  double p;

  double value(double t) const { return std::pow(t, p); }
  double derivative(double t) const { return p * std::pow(t, p - 1.0); }
  double second_derivative(double t) const { return p * (p - 1.0) * std::pow(t, p - 2.0); }
  bool smooth_at_zero() const { return p >= 2.0; }
  double domain_lo() const { return 0.0; }
};

/// g(x) = f(|x|).
template <SmoothFunction F>
struct AbsComposite {
  F f;

  double value(double x) const { return f.value(std::abs(x)); }
  double derivative(double x) const {
    if (x == 0.0) return 0.0;
    return x > 0.0 ? f.derivative(x) : -f.derivative(-x);
  }
  double second_derivative(double x) const { return f.second_derivative(std::abs(x)); }
  bool smooth_at_zero() const { return f.smooth_at_zero(); }
};

template <SmoothFunction F>
AbsComposite<F> abs_composite(F f) {
  return AbsComposite<F>{std::move(f)};
}

using AbsPower = AbsComposite<PowerFunction>;

inline AbsPower abs_power(double p) { return AbsPower{PowerFunction{p}}; }

struct SecantCoefficients {
  double mu;
  double nu;
};

template <SmoothFunction G>
SecantCoefficients secant_coeffs(const G& g, double m, double M) {
  if (!(m < M)) throw IntervalError("secant needs m < M, got [" + std::to_string(m) + ", " + std::to_string(M) + "]");
  const double gm = g.value(m);
  const double gM = g.value(M);
  return {(gM - gm) / (M - m), (M * gm - m * gM) / (M - m)};
}

struct GammaResult {
  double m = 0.0;
  double M = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double t0 = 0.0;
  double gamma = 1.0;
  double residual = 0.0;
  /// Sign-change brackets found by the scan; more than one is reported, not
  /// treated as an error.
  int brackets = 0;
  /// m == M; gamma = 1 by continuity.
  bool degenerate = false;
};

namespace detail {

constexpr int kScanPoints = 1024;

inline bool degenerate_interval(double m, double M) {
  return M == m || (M - m) <= 1e-10 * std::max(std::abs(m), std::abs(M));
}

template <SmoothFunction G>
void check_interval(const G& g, double m, double M) {
  if (!std::isfinite(m) || !std::isfinite(M)) throw IntervalError("interval endpoints must be finite");
  if (m > M) throw IntervalError("interval needs m <= M, got [" + std::to_string(m) + ", " + std::to_string(M) + "]");
  if constexpr (requires { g.domain_lo(); }) {
    if (m <= g.domain_lo()) {
      throw DomainError("interval [" + std::to_string(m) + ", " + std::to_string(M) + "] leaves the domain (" +
                        std::to_string(g.domain_lo()) + ", inf)");
    }
  }
  if (m < 0.0 && M > 0.0 && !g.smooth_at_zero()) {
    throw ClassificationError("g is not twice differentiable at 0, so it is not admissible on an interval straddling 0");
  }
}

template <SmoothFunction G>
double root_residual(const G& g, const SecantCoefficients& s, double t) {
  return s.mu * g.value(t) - g.derivative(t) * (s.mu * t + s.nu);
}

struct Root {
  double t;
  double residual;
};

/// Scans [m, M] for sign changes of the root residual, bisects each bracket to
/// width 1e-13 (relative) and polishes with two Newton steps.
template <SmoothFunction G>
std::vector<Root> find_roots(const G& g, const SecantCoefficients& s, double m, double M) {
  auto h = [&](double t) { return root_residual(g, s, t); };
  // h'(t) = -g''(t) (mu t + nu)
  auto dh = [&](double t) { return -g.second_derivative(t) * (s.mu * t + s.nu); };

  std::vector<double> grid(kScanPoints);
  std::vector<double> values(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    grid[i] = i == kScanPoints - 1 ? M : m + (M - m) * (static_cast<double>(i) / (kScanPoints - 1));
    values[i] = h(grid[i]);
  }

  const double width_tol = 1e-13 * std::max(1.0, std::max(std::abs(m), std::abs(M)));
  std::vector<Root> roots;
  for (int i = 0; i < kScanPoints; ++i) {
    if (values[i] == 0.0) {
      roots.push_back({grid[i], 0.0});
      continue;
    }
    if (i + 1 == kScanPoints || values[i + 1] == 0.0 || (values[i] < 0.0) == (values[i + 1] < 0.0)) continue;
    double lo = grid[i];
    double hi = grid[i + 1];
    double hlo = values[i];
    while (hi - lo > width_tol) {
      const double mid = 0.5 * (lo + hi);
      const double hm = h(mid);
      if (hm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((hm < 0.0) == (hlo < 0.0)) {
        lo = mid;
        hlo = hm;
      } else {
        hi = mid;
      }
    }
    double t = 0.5 * (lo + hi);
    double ht = h(t);
    for (int step = 0; step < 2 && ht != 0.0; ++step) {
      const double d = dh(t);
      if (d == 0.0 || !std::isfinite(d)) break;
      const double next = t - ht / d;
      if (!(next >= m && next <= M)) break;
      const double hn = h(next);
      if (!(std::abs(hn) < std::abs(ht))) break;
      t = next;
      ht = hn;
    }
    roots.push_back({t, ht});
  }
  return roots;
}

}  // namespace detail

/// Bound on |residual| accepted for a root of the t0 equation.
inline double t0_residual_bound(const GammaResult& r, double gm, double gM) {
  return 1e-12 * std::max(1.0, std::abs(r.mu) * std::max(std::abs(gm), std::abs(gM)));
}

/// Solves mu g(t) = g'(t)(mu t + nu) on [m, M] and evaluates the sharp constant.
/// The degenerate interval m == M returns gamma = 1, t0 = m.
template <SmoothFunction G>
GammaResult gamma_constant(const G& g, double m, double M) {
  detail::check_interval(g, m, M);
  GammaResult r;
  r.m = m;
  r.M = M;
  if (detail::degenerate_interval(m, M)) {
    r.degenerate = true;
    r.t0 = m;
    r.gamma = 1.0;
    r.mu = g.derivative(m);
    r.nu = g.value(m) - r.mu * m;
    return r;
  }
  const SecantCoefficients s = secant_coeffs(g, m, M);
  r.mu = s.mu;
  r.nu = s.nu;
  const auto roots = detail::find_roots(g, s, m, M);
  if (roots.empty()) {
    throw RootBracketError("no sign change of mu g(t) - g'(t)(mu t + nu) on [" + std::to_string(m) + ", " +
                           std::to_string(M) + "]");
  }
  r.brackets = static_cast<int>(roots.size());
  // With several roots the sharp constant is the largest secant/g ratio among
  // roots where g does not vanish.
  std::optional<detail::Root> best;
  double best_gamma = -std::numeric_limits<double>::infinity();
  for (const auto& root : roots) {
    const double gt = g.value(root.t);
    if (std::abs(gt) <= 1e-14) continue;
    const double gamma = (s.mu * root.t + s.nu) / gt;
    if (gamma > best_gamma) {
      best_gamma = gamma;
      best = root;
    }
  }
  if (!best) {
    throw SingularityError("g(t0) vanishes at every root on [" + std::to_string(m) + ", " + std::to_string(M) +
                           "]; the constant is singular");
  }
  r.t0 = best->t;
  r.residual = best->residual;
  r.gamma = best_gamma;
  return r;
}

template <SmoothFunction G>
double solve_t0(const G& g, double m, double M) {
  if (!(m < M)) throw IntervalError("solve_t0 needs m < M");
  return gamma_constant(g, m, M).t0;
}

/// K(m, M, p) = gamma(m, M, t^p) for 0 < m < M and p outside [0, 1].
inline double kantorovich_power(double m, double M, double p) {
  if (!(m > 0.0)) throw ParameterError("kantorovich_power needs m > 0");
  if (!(m < M)) throw ParameterError("kantorovich_power needs m < M");
  if (!std::isfinite(p) || (p >= 0.0 && p <= 1.0)) throw ParameterError("kantorovich_power needs p outside [0, 1]");
  return gamma_constant(PowerFunction{p}, m, M).gamma;
}

/// Closed form for g(t) = |t|^p:
///   (m|M|^p - M|m|^p) / ((p-1)(M-m)) * |(p-1)/p * (|M|^p - |m|^p) / (m|M|^p - M|m|^p)|^p.
/// Returns 1 on a degenerate interval.
inline double kantorovich_abs_power(double m, double M, double p) {
  if (!(p >= 2.0)) throw ParameterError("kantorovich_abs_power needs p >= 2");
  if (m > M) throw IntervalError("kantorovich_abs_power needs m <= M");
  if (detail::degenerate_interval(m, M)) return 1.0;
  const double aM = std::pow(std::abs(M), p);
  const double am = std::pow(std::abs(m), p);
  const double denom = m * aM - M * am;
  if (std::abs(denom) <= 1e-14 * std::max(1.0, std::max(std::abs(m) * aM, std::abs(M) * am))) {
    throw SingularityError("m|M|^p - M|m|^p vanishes on [" + std::to_string(m) + ", " + std::to_string(M) + "]");
  }
  return denom / ((p - 1.0) * (M - m)) * std::pow(std::abs((p - 1.0) / p * (aM - am) / denom), p);
}

/// How gamma^{-1} was obtained at a use site.
enum class GammaRegime {
  regular,
  degenerate,
  /// [m, M] contains 0 in its interior and g(0) = 0: the secant-to-g ratio is
  /// unbounded, gamma = inf, gamma^{-1} = 0.
  straddles_zero,
};

struct InverseGamma {
  double value = 1.0;
  GammaRegime regime = GammaRegime::regular;
  std::optional<GammaResult> detail;
};

/// gamma(m, M, g)^{-1} as used inside the bound matrices.
template <SmoothFunction G>
InverseGamma inverse_gamma(const G& g, double m, double M) {
  detail::check_interval(g, m, M);
  if (detail::degenerate_interval(m, M)) return {1.0, GammaRegime::degenerate, gamma_constant(g, m, M)};
  if (m < 0.0 && M > 0.0 && g.value(0.0) == 0.0) return {0.0, GammaRegime::straddles_zero, std::nullopt};
  const GammaResult r = gamma_constant(g, m, M);
  return {1.0 / r.gamma, GammaRegime::regular, r};
}

}  // namespace superquad
