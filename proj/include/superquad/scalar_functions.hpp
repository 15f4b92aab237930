#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "superquad/errors.hpp"
#include "superquad/linalg.hpp"

namespace superquad {

enum class Family { pow_p, neg_pow_q, x2_log, neg_root_sum, square };
enum class Curvature { convex, concave };
enum class Monotonicity { increasing, decreasing };

/// Class flags of a registry member. They are declared per family, not
/// inferred; tests spot-check them numerically.
struct FunctionFlags {
  bool superquadratic = true;
  Curvature curvature = Curvature::convex;
  Monotonicity monotonicity = Monotonicity::increasing;
  /// f >= 0 on its domain.
  bool positive = false;
  bool strictly_convex = false;
  /// g(x) = f(|x|) is twice differentiable at x = 0.
  bool smooth_at_zero = false;
  /// Curvature and monotonicity hold on [shape_region_lo, inf). Zero except for
  /// x2_log, which is neither convex nor increasing near the origin.
  double shape_region_lo = 0.0;
};

/// A scalar superquadratic (or test) function with first and second
/// derivatives. Value semantics; cheap to copy.
class ScalarFunctionModel {
 public:
  ScalarFunctionModel(Family family, double param) : family_(family), param_(param) {}

  Family family() const noexcept { return family_; }
  double param() const noexcept { return param_; }

  std::string_view name() const {
    switch (family_) {
      case Family::pow_p: return "pow_p";
      case Family::neg_pow_q: return "neg_pow_q";
      case Family::x2_log: return "x2_log";
      case Family::neg_root_sum: return "neg_root_sum";
      case Family::square: return "square";
    }
    return "?";
  }

  /// "name:param" (param omitted for parameterless families), at full precision.
  std::string specifier() const {
    std::string out(name());
    if (has_param()) {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, param_);
      out += ':';
      out.append(buf, end);
    }
    return out;
  }

  bool has_param() const { return family_ != Family::x2_log && family_ != Family::square; }

  double domain_lo() const {
    return family_ == Family::square ? -std::numeric_limits<double>::infinity() : 0.0;
  }

  double value(double t) const {
    switch (family_) {
      case Family::pow_p: return std::pow(t, param_);
      case Family::neg_pow_q: return -std::pow(t, param_);
      case Family::x2_log: return t > 0.0 ? t * t * std::log(t) : 0.0;
      case Family::neg_root_sum: return -std::pow(1.0 + std::pow(t, 1.0 / param_), param_);
      case Family::square: return t * t;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// One-sided at t = 0.
  double derivative(double t) const {
    switch (family_) {
      case Family::pow_p: return param_ * std::pow(t, param_ - 1.0);
      case Family::neg_pow_q: return param_ == 1.0 ? -1.0 : -param_ * std::pow(t, param_ - 1.0);
      case Family::x2_log: return t > 0.0 ? t * (2.0 * std::log(t) + 1.0) : 0.0;
      case Family::neg_root_sum: {
        if (param_ == 1.0) return -1.0;
        const double s = 1.0 / param_;
        return -std::pow(1.0 + std::pow(t, s), param_ - 1.0) * std::pow(t, s - 1.0);
      }
      case Family::square: return 2.0 * t;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  double second_derivative(double t) const {
    switch (family_) {
      case Family::pow_p:
        return param_ == 2.0 ? 2.0 : param_ * (param_ - 1.0) * std::pow(t, param_ - 2.0);
      case Family::neg_pow_q:
        if (param_ == 1.0) return 0.0;
        if (param_ == 2.0) return -2.0;
        return -param_ * (param_ - 1.0) * std::pow(t, param_ - 2.0);
      case Family::x2_log:
        return t > 0.0 ? 2.0 * std::log(t) + 3.0 : -std::numeric_limits<double>::infinity();
      case Family::neg_root_sum: {
        if (param_ == 1.0) return 0.0;
        const double s = 1.0 / param_;
        const double u = 1.0 + std::pow(t, s);
        return -((param_ - 1.0) * s * std::pow(u, param_ - 2.0) * std::pow(t, 2.0 * s - 2.0) +
                 (s - 1.0) * std::pow(u, param_ - 1.0) * std::pow(t, s - 2.0));
      }
      case Family::square: return 2.0;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  bool smooth_at_zero() const { return flags().smooth_at_zero; }

  FunctionFlags flags() const {
    FunctionFlags fl;
    switch (family_) {
      case Family::pow_p:
      case Family::square:
        fl.positive = true;
        fl.strictly_convex = true;
        fl.smooth_at_zero = true;
        break;
      case Family::neg_pow_q:
      case Family::neg_root_sum:
        fl.curvature = Curvature::concave;
        fl.monotonicity = Monotonicity::decreasing;
        break;
      case Family::x2_log:
        fl.strictly_convex = true;
        fl.shape_region_lo = std::exp(-0.5);
        break;
    }
    return fl;
  }

  bool is_concave_decreasing() const {
    const auto fl = flags();
    return fl.superquadratic && fl.curvature == Curvature::concave && fl.monotonicity == Monotonicity::decreasing &&
           fl.shape_region_lo == 0.0;
  }

  bool is_convex_increasing_positive() const {
    const auto fl = flags();
    return fl.superquadratic && fl.curvature == Curvature::convex && fl.monotonicity == Monotonicity::increasing &&
           fl.positive && fl.strictly_convex && fl.shape_region_lo == 0.0;
  }

 private:
  Family family_;
  double param_;
};

/// Parses a real, accepting rational syntax "a/b" so that 4/3 can be passed at
/// full precision.
inline double parse_real(std::string_view text) {
  auto parse_plain = [&](std::string_view s) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) {
      throw ParameterError("cannot parse real number '" + std::string(text) + "'");
    }
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const double num = parse_plain(text.substr(0, slash));
    const double den = parse_plain(text.substr(slash + 1));
    if (den == 0.0) throw ParameterError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_plain(text);
}

inline ScalarFunctionModel make_function(std::string_view name, std::optional<double> param = std::nullopt) {
  auto need = [&](double lo, double hi, bool lo_open, std::string_view interval) {
    if (!param) throw ParameterError(std::string(name) + " needs a parameter in " + std::string(interval));
    const double v = *param;
    const bool ok = std::isfinite(v) ? ((lo_open ? v > lo : v >= lo) && v <= hi) : false;
    if (!ok) {
      throw ParameterError(std::string(name) + " parameter " + std::to_string(v) + " outside " + std::string(interval));
    }
    return v;
  };
  constexpr double inf = std::numeric_limits<double>::max();
  if (name == "pow_p") return {Family::pow_p, need(2.0, inf, false, "p in [2, inf)")};
  if (name == "neg_pow_q") return {Family::neg_pow_q, need(1.0, 2.0, false, "q in [1, 2]")};
  if (name == "neg_root_sum") return {Family::neg_root_sum, need(0.0, 1.0, true, "r in (0, 1]")};
  if (name == "x2_log" || name == "square") {
    if (param) throw ParameterError(std::string(name) + " takes no parameter");
    return {name == "x2_log" ? Family::x2_log : Family::square, 0.0};
  }
  throw ParameterError("unknown function '" + std::string(name) +
                       "' (expected pow_p, neg_pow_q, x2_log, neg_root_sum or square)");
}

/// Parses "name:param", e.g. "neg_pow_q:4/3" or "x2_log".
inline ScalarFunctionModel parse_function(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) return make_function(spec);
  return make_function(spec.substr(0, colon), parse_real(spec.substr(colon + 1)));
}

/// f applied to the spectrum of m. Eigenvalues within the PSD clamp tolerance
/// below the domain edge are clamped onto it.
inline SymmetricMatrix apply_scalar_function(const ScalarFunctionModel& f, const SymmetricMatrix& m) {
  const double lo = f.domain_lo();
  const double tol = std::isfinite(lo) ? psd_clamp_tolerance(m) : 0.0;
  return apply_function(
      [&](double t) {
        if (t < lo - tol) {
          throw DomainError("eigenvalue " + std::to_string(t) + " outside the domain of " + f.specifier());
        }
        return f.value(std::max(t, lo));
      },
      m);
}

/// f(s) - f(t) - f'(t)(s - t) - f(|s - t|), i.e. the defining inequality with
/// the witness C_t = f'(t).
inline double superquadratic_gap(const ScalarFunctionModel& f, double s, double t) {
  if (s < 0.0 || t < 0.0) throw DomainError("superquadratic_gap needs s, t >= 0");
  return f.value(s) - f.value(t) - f.derivative(t) * (s - t) - f.value(std::abs(s - t));
}

/// Right side minus left side of the superquadratic Jensen inequality
///   f(a t + (1-a) s) <= a f(t) + (1-a) f(s) - a f((1-a)|t-s|) - (1-a) f(a|t-s|).
inline double jensen_gap_scalar(const ScalarFunctionModel& f, double t, double s, double alpha) {
  if (s < 0.0 || t < 0.0) throw DomainError("jensen_gap_scalar needs s, t >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
  const double d = std::abs(t - s);
  const double rhs =
      alpha * f.value(t) + (1.0 - alpha) * f.value(s) - alpha * f.value((1.0 - alpha) * d) - (1.0 - alpha) * f.value(alpha * d);
  return rhs - f.value(alpha * t + (1.0 - alpha) * s);
}

struct WitnessInterval {
  double lo;
  double hi;
};

/// Feasible witnesses C for the defining inequality at t over the sample points,
/// intersected with [f'(t) - delta, f'(t) + delta]. The inequality is linear in
/// C, so the feasible set is an interval computed exactly. Empty -> nullopt.
inline std::optional<WitnessInterval> superquadratic_witness(const ScalarFunctionModel& f, double t,
                                                             std::span<const double> samples, double delta = 1.0,
                                                             double tol = 1e-9) {
  if (t < 0.0) throw DomainError("superquadratic_witness needs t >= 0");
  double lo = f.derivative(t) - delta;
  double hi = f.derivative(t) + delta;
  for (double s : samples) {
    if (s < 0.0) throw DomainError("superquadratic_witness needs samples >= 0");
    const double slack = f.value(s) - f.value(t) - f.value(std::abs(s - t)) + tol;
    if (s > t) {
      hi = std::min(hi, slack / (s - t));
    } else if (s < t) {
      lo = std::max(lo, slack / (s - t));
    } else if (slack < 0.0) {
      return std::nullopt;
    }
  }
  if (lo > hi) return std::nullopt;
  return WitnessInterval{lo, hi};
}

}  // namespace superquad
