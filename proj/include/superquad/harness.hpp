#pragma once

// Property suites. Each trial draws an instance from a seed derived from
// (master_seed, suite, trial), serializes it to JSON and evaluates the JSON, so
// a stored counterexample replays exactly.

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "superquad/bounds.hpp"
#include "superquad/errors.hpp"
#include "superquad/json_io.hpp"
#include "superquad/linalg.hpp"
#include "superquad/random.hpp"
#include "superquad/scalar_functions.hpp"

namespace superquad {

// ---------------------------------------------------------------------------
// Scalar-product checkers

enum class JensenMode {
  /// f(<Ax,x>) <= <f(A)x,x> for convex f, reversed for concave f.
  mp,
  /// f(<Ax,x>) <= <f(A)x,x> - <f(|A - <Ax,x>|)x,x> for superquadratic f.
  k,
  /// The same with A replaced by a unital map Phi inside the brackets.
  kd,
};

struct JensenTerms {
  double margin;
  /// Largest magnitude among the terms, for normalization.
  double scale;
};

namespace detail {

inline void require_unit(const Vector& x) {
  if (!(std::abs(x.norm() - 1.0) <= 1e-12)) throw ParameterError("x must be a unit vector (||x|| = " + std::to_string(x.norm()) + ")");
}

inline double quad(const SymmetricMatrix& m, const Vector& x) { return x.dot(m.matrix() * x); }

}  // namespace detail

inline JensenTerms jensen_terms(const ScalarFunctionModel& f, const SymmetricMatrix& a, const Vector& x,
                                JensenMode mode, const PositiveMapCD* phi = nullptr) {
  detail::require_unit(x);
  if (mode == JensenMode::mp) {
    if (a.dim() != x.size()) throw DimensionError("vector length does not match the matrix");
    const auto fl = f.flags();
    if (fl.shape_region_lo != 0.0) throw ClassificationError(f.specifier() + " is neither convex nor concave on its domain");
    const double s = detail::quad(a, x);
    const double avg = detail::quad(apply_scalar_function(f, a), x);
    const double fs = f.value(std::max(s, f.domain_lo()));
    const double margin = fl.curvature == Curvature::convex ? avg - fs : fs - avg;
    return {margin, std::max({1.0, std::abs(avg), std::abs(fs)})};
  }
  if (!f.flags().superquadratic) throw ClassificationError(f.specifier() + " is not superquadratic");
  detail::require_psd(a, "A");
  if (mode == JensenMode::k) {
    if (a.dim() != x.size()) throw DimensionError("vector length does not match the matrix");
    const double s = detail::quad(a, x);
    const double first = detail::quad(apply_scalar_function(f, a), x);
    const double penalty = detail::quad(apply_scalar_function(f, matrix_abs(a.shifted(-s))), x);
    const double fs = f.value(std::max(s, 0.0));
    return {first - penalty - fs, std::max({1.0, std::abs(first), std::abs(penalty), std::abs(fs)})};
  }
  if (!phi) throw MapError("mode kd needs a unital map");
  phi->validate();
  if (phi->dim() != x.size()) throw DimensionError("vector length does not match the map");
  const double s = detail::quad((*phi)(a), x);
  const double first = detail::quad((*phi)(apply_scalar_function(f, a)), x);
  const double penalty = detail::quad((*phi)(apply_scalar_function(f, matrix_abs(a.shifted(-s)))), x);
  const double fs = f.value(std::max(s, 0.0));
  return {first - penalty - fs, std::max({1.0, std::abs(first), std::abs(penalty), std::abs(fs)})};
}

/// Signed margin of the selected scalar-product inequality (>= 0 when it holds).
inline double check_vector_jensen(const ScalarFunctionModel& f, const SymmetricMatrix& a, const Vector& x,
                                  JensenMode mode = JensenMode::k, const PositiveMapCD* phi = nullptr) {
  return jensen_terms(f, a, x, mode, phi).margin;
}

/// lambda(((a+b)/2)^p) <= lambda((a^p + b^p)/2).
inline OrderVerdict check_power_mean(const SymmetricMatrix& a, const SymmetricMatrix& b, double p,
                                     const ComparisonTolerance& tol = default_tolerance()) {
  if (!(p >= 1.0)) throw ParameterError("p must be at least 1");
  SymmetricMatrix::check_same_dim(a, b);
  detail::require_psd(a, "A");
  detail::require_psd(b, "B");
  return eig_order_leq(pow_psd(0.5 * (a + b), p), 0.5 * (pow_psd(a, p) + pow_psd(b, p)), tol);
}

// ---------------------------------------------------------------------------
// Comparing the two concave upper bounds

enum class Tighter { thm21, thm25, incomparable, tie };

inline const char* to_string(Tighter t) {
  switch (t) {
    case Tighter::thm21: return "thm21";
    case Tighter::thm25: return "thm25";
    case Tighter::incomparable: return "incomparable";
    case Tighter::tie: return "tie";
  }
  return "?";
}

struct ComparisonRecord {
  std::string id;
  Vector bound_thm21_spectrum;
  Vector bound_thm25_spectrum;
  Tighter tighter;
};

/// The smaller upper bound is the tighter one. Differences within
/// 1e-9 * max(1, |entries|) count as equal.
inline Tighter classify_spectra(const Vector& s21, const Vector& s25) {
  const double tol = 1e-9 * std::max({1.0, s21.cwiseAbs().maxCoeff(), s25.cwiseAbs().maxCoeff()});
  const Vector d = s21 - s25;
  const bool le21 = (d.array() <= tol).all();
  const bool le25 = (d.array() >= -tol).all();
  if (le21 && le25) return Tighter::tie;
  if (le25) return Tighter::thm25;
  if (le21) return Tighter::thm21;
  return Tighter::incomparable;
}

inline ComparisonRecord compare_estimates(const ScalarFunctionModel& f, const SymmetricMatrix& a,
                                          const SymmetricMatrix& b, double alpha, std::string id = {}) {
  const BoundReport s = concave_bound_S(f, a, b, alpha);
  const BoundReport t = combine_pair_bound(f, a, b, alpha);
  ComparisonRecord r{std::move(id), s.bound_spectrum(), t.bound_spectrum(), Tighter::tie};
  r.tighter = classify_spectra(r.bound_thm21_spectrum, r.bound_thm25_spectrum);
  return r;
}

// ---------------------------------------------------------------------------
// Suite configuration

inline std::vector<std::string> default_suite_functions() {
  return {"neg_pow_q:1", "neg_pow_q:1.25", "neg_pow_q:1.5", "neg_pow_q:1.75", "neg_pow_q:2", "neg_root_sum:0.5",
          "x2_log",      "pow_p:2",        "pow_p:2.5",      "pow_p:3"};
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "thm21",          "thm25",           "thm29",
      "eq_mp",          "eq_k",            "eq_kd",
      "eq_aj_p",        "eq_unit",         "congruence",
      "sandwich_lower", "sandwich_upper_derived", "sandwich_upper_paper",
      "cor211_reciprocal", "cor211_paper", "dilation"};
  return names;
}

struct SuiteConfig {
  std::uint64_t master_seed = 42;
  /// Trials per bound suite; the scalar-product suites run twice as many.
  int trials = 500;
  std::vector<int> dims{2, 3, 4, 5, 6};
  /// Also the source of the q grid (neg_pow_q parameters) and the p grid
  /// (pow_p parameters).
  std::vector<std::string> functions = default_suite_functions();
  std::vector<double> alphas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double spread = 10.0;
  /// atol is the normalized-margin threshold for bound suites.
  ComparisonTolerance tolerance{1e-8, 0.0};
  /// Normalized-margin threshold for the scalar-product and eigenvalue-order
  /// preliminaries.
  double preliminary_tolerance = 1e-9;
  /// sigma_min(A - B) floor for the invertible-difference generators.
  double gap = 0.1;
  /// Empty: run every suite.
  std::vector<std::string> suites;

  void validate() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (dims.empty()) throw ConfigError("dims must be non-empty");
    for (int d : dims)
      if (d < 1) throw ConfigError("dims must be positive");
    if (alphas.empty()) throw ConfigError("alphas must be non-empty");
    for (double a : alphas)
      if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alphas must lie in [0, 1]");
    if (!(spread > 0.0) || !std::isfinite(spread)) throw ConfigError("spread must be positive");
    if (!(gap > 0.0 && gap < spread)) throw ConfigError("gap must lie in (0, spread)");
    if (!(tolerance.atol >= 0.0) || !(tolerance.rtol >= 0.0) || !(preliminary_tolerance >= 0.0)) {
      throw ConfigError("tolerances must be non-negative");
    }
    if (functions.empty()) throw ConfigError("functions must be non-empty");
    for (const auto& f : functions) {
      try {
        parse_function(f);
      } catch (const Error& e) {
        throw ConfigError(std::string("bad function specifier: ") + e.what());
      }
    }
    for (const auto& s : suites) {
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
        throw ConfigError("unknown suite '" + s + "'");
      }
    }
  }
};

inline Json to_json(const SuiteConfig& c) {
  return Json{{"master_seed", c.master_seed},
              {"trials", c.trials},
              {"dims", c.dims},
              {"functions", c.functions},
              {"alphas", c.alphas},
              {"spread", c.spread},
              {"tolerance", {{"atol", c.tolerance.atol}, {"rtol", c.tolerance.rtol}}},
              {"preliminary_tolerance", c.preliminary_tolerance},
              {"gap", c.gap},
              {"suites", c.suites}};
}

/// Fields absent from `j` keep the values already in `base`.
inline SuiteConfig suite_config_from_json(const Json& j, SuiteConfig base = {}) {
  if (!j.is_object()) throw ConfigError("suite config must be a JSON object");
  static const std::set<std::string> known{"master_seed", "trials", "dims",     "functions", "alphas",
                                           "spread",      "tolerance", "preliminary_tolerance", "gap", "suites"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown suite config field '" + key + "'");
  }
  try {
    if (j.contains("master_seed")) base.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("trials")) base.trials = j.at("trials").get<int>();
    if (j.contains("dims")) base.dims = j.at("dims").get<std::vector<int>>();
    if (j.contains("functions")) base.functions = j.at("functions").get<std::vector<std::string>>();
    if (j.contains("alphas")) base.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("spread")) base.spread = j.at("spread").get<double>();
    if (j.contains("tolerance")) {
      const Json& t = j.at("tolerance");
      if (t.contains("atol")) base.tolerance.atol = t.at("atol").get<double>();
      if (t.contains("rtol")) base.tolerance.rtol = t.at("rtol").get<double>();
    }
    if (j.contains("preliminary_tolerance")) base.preliminary_tolerance = j.at("preliminary_tolerance").get<double>();
    if (j.contains("gap")) base.gap = j.at("gap").get<double>();
    if (j.contains("suites")) base.suites = j.at("suites").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed suite config: ") + e.what());
  }
  return base;
}

// ---------------------------------------------------------------------------
// Suite registry

struct Evaluation {
  /// Normalized margin; >= -threshold passes.
  double margin = 0.0;
  double threshold = 0.0;
  /// Set when a side condition fails (e.g. gamma < 1); forces a failure.
  std::optional<std::string> violation;

  bool pass() const { return margin >= -threshold && !violation; }
};

struct TrialContext {
  const SuiteConfig& config;
  int trial;
  Rng& rng;
};

struct SuiteSpec {
  std::string name;
  /// Failures of unasserted suites are collected but do not fail the run.
  bool asserted = true;
  int trial_factor = 1;
  /// Empty result: no applicable function or parameter in the config.
  std::function<std::optional<Json>(const TrialContext&)> generate;
  std::function<Evaluation(const Json&, const SuiteConfig&)> evaluate;
};

namespace detail {

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

inline std::vector<std::string> functions_where(const SuiteConfig& c,
                                                const std::function<bool(const ScalarFunctionModel&)>& keep) {
  std::vector<std::string> out;
  for (const auto& s : c.functions) {
    const auto f = parse_function(s);
    if (keep(f)) out.push_back(f.specifier());
  }
  return out;
}

inline std::vector<double> params_of(const SuiteConfig& c, Family family) {
  std::vector<double> out;
  for (const auto& s : c.functions) {
    const auto f = parse_function(s);
    if (f.family() == family) out.push_back(f.param());
  }
  return out;
}

inline Index pick_dim(const TrialContext& ctx) { return pick(ctx.config.dims, ctx.rng); }

inline SymmetricMatrix sym(const Json& j, const char* key) { return symmetric_from_json(j.at(key)); }

inline Evaluation bound_evaluation(const BoundReport& r, const SuiteConfig& c) {
  return {r.normalized_margin(), c.tolerance.atol, std::nullopt};
}

inline std::pair<SymmetricMatrix, SymmetricMatrix> pd_pair(const TrialContext& ctx, Index n) {
  // Alternate the rejection sampler with definite differences so that both
  // the infinite and the finite reverse Jensen constants get exercised.
  const std::uint64_t seed = ctx.rng();
  if (ctx.trial % 2 == 0) return random_pd_pair_invertible_diff(n, seed, ctx.config.spread, ctx.config.gap);
  return random_pd_pair_definite_diff(n, seed, ctx.config.spread, ctx.config.gap);
}

inline bool is_superquadratic_on_half_line(const ScalarFunctionModel& f) { return f.flags().superquadratic; }

inline std::optional<Json> jensen_instance(const TrialContext& ctx, JensenMode mode) {
  const auto fs = functions_where(ctx.config, [mode](const ScalarFunctionModel& f) {
    return mode == JensenMode::mp ? f.flags().shape_region_lo == 0.0 : is_superquadratic_on_half_line(f);
  });
  if (fs.empty()) return std::nullopt;
  const Index n = pick_dim(ctx);
  Json j{{"f", pick(fs, ctx.rng)}};
  if (mode == JensenMode::kd) {
    const PositiveMapCD map = random_unital_map(n, ctx.rng());
    const Index input = ctx.trial % 2 == 0 ? n : 2 * n;
    j["a"] = matrix_json(random_psd(input, ctx.rng(), ctx.config.spread));
    j["c"] = matrix_json(map.c);
    j["d"] = matrix_json(map.d);
  } else {
    j["a"] = matrix_json(random_psd(n, ctx.rng(), ctx.config.spread));
  }
  j["x"] = vector_json(random_unit_vector(n, ctx.rng));
  return j;
}

inline Evaluation jensen_evaluation(const Json& j, const SuiteConfig& c, JensenMode mode) {
  const auto f = parse_function(j.at("f").get<std::string>());
  std::optional<PositiveMapCD> map;
  if (mode == JensenMode::kd) map = PositiveMapCD{matrix_from_json(j.at("c")), matrix_from_json(j.at("d"))};
  const JensenTerms t = jensen_terms(f, sym(j, "a"), vector_from_json(j.at("x")), mode, map ? &*map : nullptr);
  return {t.margin / t.scale, c.preliminary_tolerance, std::nullopt};
}

inline std::optional<Json> sandwich_instance(const TrialContext& ctx) {
  const auto qs = params_of(ctx.config, Family::neg_pow_q);
  if (qs.empty()) return std::nullopt;
  const Index n = pick_dim(ctx);
  const double q = pick(qs, ctx.rng);
  SymmetricMatrix x = random_psd(n, ctx.rng(), ctx.config.spread);
  SymmetricMatrix y = random_psd(n, ctx.rng(), ctx.config.spread);
  // Every fourth trial uses the diagonal family x = y; trial 0 is x = y = I.
  if (ctx.trial == 0) {
    x = SymmetricMatrix::identity(n);
    y = x;
  } else if (ctx.trial % 4 == 0) {
    y = x;
  }
  return Json{{"q", q}, {"x", matrix_json(x)}, {"y", matrix_json(y)}};
}

inline Evaluation sandwich_evaluation(const Json& j, const SuiteConfig& c, int which) {
  const double q = j.at("q").get<double>();
  const auto variant = which == 2 ? CorrectionVariant::paper : CorrectionVariant::derived;
  const SandwichReport r = subadditivity_sandwich(sym(j, "x"), sym(j, "y"), q, variant);
  const OrderVerdict& v = which == 0 ? r.lower_verdict : r.upper_verdict;
  return {v.margin / r.scale(), c.tolerance.atol, std::nullopt};
}

inline std::optional<Json> cor211_instance(const TrialContext& ctx) {
  const auto ps = params_of(ctx.config, Family::pow_p);
  if (ps.empty()) return std::nullopt;
  const Index n = pick_dim(ctx);
  const double p = pick(ps, ctx.rng);
  auto [a, b] = pd_pair(ctx, n);
  return Json{{"p", p}, {"a", matrix_json(a)}, {"b", matrix_json(b)}};
}

inline Evaluation cor211_evaluation(const Json& j, const SuiteConfig& c, KantorovichVariant variant) {
  return bound_evaluation(cor_power_convex(sym(j, "a"), sym(j, "b"), j.at("p").get<double>(), variant), c);
}

inline std::optional<std::string> gamma_violation(const Ingredients& ing) {
  for (const std::string key : {"gamma_alpha", "gamma_one_minus_alpha"}) {
    const double gamma = std::get<double>(ing.at(key));
    if (!(gamma >= 1.0 - 1e-12)) return key + " = " + std::to_string(gamma) + " < 1";
    if (auto it = ing.find(key + "_scaled_residual"); it != ing.end()) {
      const double res = std::get<double>(it->second);
      if (!(res <= 1e-12)) return key + " t0 residual " + std::to_string(res) + " > 1e-12";
    }
  }
  return std::nullopt;
}

inline std::vector<SuiteSpec> build_suites() {
  std::vector<SuiteSpec> s;
  auto concave = [](const ScalarFunctionModel& f) { return f.is_concave_decreasing(); };
  auto convex = [](const ScalarFunctionModel& f) { return f.is_convex_increasing_positive(); };

  s.push_back({"thm21", true, 1,
               [concave](const TrialContext& ctx) -> std::optional<Json> {
                 const auto fs = functions_where(ctx.config, concave);
                 if (fs.empty()) return std::nullopt;
                 const Index n = pick_dim(ctx);
                 Json j{{"f", pick(fs, ctx.rng)}, {"alpha", pick(ctx.config.alphas, ctx.rng)}};
                 j["a"] = matrix_json(random_psd(n, ctx.rng(), ctx.config.spread));
                 j["b"] = matrix_json(random_psd(n, ctx.rng(), ctx.config.spread));
                 return j;
               },
               [](const Json& j, const SuiteConfig& c) {
                 return bound_evaluation(concave_bound_S(parse_function(j.at("f").get<std::string>()), sym(j, "a"),
                                                         sym(j, "b"), j.at("alpha").get<double>()),
                                         c);
               }});

  s.push_back({"thm25", true, 1,
               [concave](const TrialContext& ctx) -> std::optional<Json> {
                 const auto fs = functions_where(ctx.config, concave);
                 if (fs.empty()) return std::nullopt;
                 const Index n = pick_dim(ctx);
                 const PositiveMapCD map = random_unital_map(n, ctx.rng());
                 const Index input = ctx.trial % 2 == 0 ? n : 2 * n;
                 return Json{{"f", pick(fs, ctx.rng)},
                             {"a", matrix_json(random_psd(input, ctx.rng(), ctx.config.spread))},
                             {"c", matrix_json(map.c)},
                             {"d", matrix_json(map.d)}};
               },
               [](const Json& j, const SuiteConfig& c) {
                 const PositiveMapCD map{matrix_from_json(j.at("c")), matrix_from_json(j.at("d"))};
                 return bound_evaluation(phi_bound(parse_function(j.at("f").get<std::string>()), map, sym(j, "a")), c);
               }});

  s.push_back({"thm29", true, 1,
               [convex](const TrialContext& ctx) -> std::optional<Json> {
                 const auto fs = functions_where(ctx.config, convex);
                 if (fs.empty()) return std::nullopt;
                 const Index n = pick_dim(ctx);
                 Json j{{"f", pick(fs, ctx.rng)}, {"alpha", pick(ctx.config.alphas, ctx.rng)}};
                 auto [a, b] = pd_pair(ctx, n);
                 j["a"] = matrix_json(a);
                 j["b"] = matrix_json(b);
                 return j;
               },
               [](const Json& j, const SuiteConfig& c) {
                 const BoundReport r = convex_bound_T(parse_function(j.at("f").get<std::string>()), sym(j, "a"),
                                                      sym(j, "b"), j.at("alpha").get<double>());
                 Evaluation e = bound_evaluation(r, c);
                 e.violation = gamma_violation(r.ingredients);
                 return e;
               }});

  s.push_back({"eq_mp", true, 2, [](const TrialContext& ctx) { return jensen_instance(ctx, JensenMode::mp); },
               [](const Json& j, const SuiteConfig& c) { return jensen_evaluation(j, c, JensenMode::mp); }});
  s.push_back({"eq_k", true, 2, [](const TrialContext& ctx) { return jensen_instance(ctx, JensenMode::k); },
               [](const Json& j, const SuiteConfig& c) { return jensen_evaluation(j, c, JensenMode::k); }});
  s.push_back({"eq_kd", true, 2, [](const TrialContext& ctx) { return jensen_instance(ctx, JensenMode::kd); },
               [](const Json& j, const SuiteConfig& c) { return jensen_evaluation(j, c, JensenMode::kd); }});

  s.push_back({"eq_aj_p", true, 2,
               [](const TrialContext& ctx) -> std::optional<Json> {
                 std::vector<double> ps{1.0};
                 for (double q : params_of(ctx.config, Family::neg_pow_q)) ps.push_back(q);
                 for (double p : params_of(ctx.config, Family::pow_p)) ps.push_back(p);
                 const Index n = pick_dim(ctx);
                 return Json{{"p", pick(ps, ctx.rng)},
                             {"a", matrix_json(random_psd(n, ctx.rng(), ctx.config.spread))},
                             {"b", matrix_json(random_psd(n, ctx.rng(), ctx.config.spread))}};
               },
               [](const Json& j, const SuiteConfig& c) {
                 const SymmetricMatrix a = sym(j, "a");
                 const SymmetricMatrix b = sym(j, "b");
                 const double p = j.at("p").get<double>();
                 const OrderVerdict v = check_power_mean(a, b, p);
                 const double scale = std::max({1.0, pow_psd(a, p).norm_2(), pow_psd(b, p).norm_2()});
                 return Evaluation{v.margin / scale, c.preliminary_tolerance, std::nullopt};
               }});

  s.push_back({"eq_unit", true, 1,
               [](const TrialContext& ctx) -> std::optional<Json> {
                 // h = Q (k - P) Q^T with P PSD, so lambda(h) <= lambda(k) by construction.
                 const Index n = pick_dim(ctx);
                 const double spread = ctx.config.spread;
                 const SymmetricMatrix k = random_with_spectrum(n, -spread, spread, ctx.rng);
                 const SymmetricMatrix p = random_psd(n, ctx.rng(), spread);
                 const Matrix q = random_orthogonal(n, ctx.rng);
                 return Json{{"h", matrix_json((k - p).congruence(q.transpose()))}, {"k", matrix_json(k)}};
               },
               [](const Json& j, const SuiteConfig& c) {
                 const SymmetricMatrix h = sym(j, "h");
                 const SymmetricMatrix k = sym(j, "k");
                 const double scale = std::max({1.0, h.norm_2(), k.norm_2()});
                 if (!eig_order_leq(h, k).pass) {
                   return Evaluation{eig_order_leq(h, k).margin / scale, c.preliminary_tolerance,
                                     "eigenvalue order fails; no conjugating orthogonal exists"};
                 }
                 const OrthogonalMatrix q = conjugating_orthogonal(h, k);
                 return Evaluation{loewner_leq(h, k.congruence(q.matrix())).margin / scale, c.preliminary_tolerance,
                                   std::nullopt};
               }});

  s.push_back({"congruence", true, 1,
               [](const TrialContext& ctx) -> std::optional<Json> {
                 const Index n = pick_dim(ctx);
                 return Json{{"z", matrix_json(Matrix(gaussian_matrix(n, n, ctx.rng) *
                                                      std::sqrt(ctx.config.spread)))}};
               },
               [](const Json& j, const SuiteConfig&) {
                 const Matrix z = matrix_from_json(j.at("z"));
                 const double scale = std::max(1.0, z.squaredNorm());
                 const double residual = congruence_residual(z, congruence_orthogonal(z));
                 return Evaluation{(1e-10 * scale - residual) / scale, 0.0, std::nullopt};
               }});

  s.push_back({"sandwich_lower", true, 1, sandwich_instance,
               [](const Json& j, const SuiteConfig& c) { return sandwich_evaluation(j, c, 0); }});
  s.push_back({"sandwich_upper_derived", true, 1, sandwich_instance,
               [](const Json& j, const SuiteConfig& c) { return sandwich_evaluation(j, c, 1); }});
  s.push_back({"sandwich_upper_paper", false, 1, sandwich_instance,
               [](const Json& j, const SuiteConfig& c) { return sandwich_evaluation(j, c, 2); }});

  s.push_back({"cor211_reciprocal", true, 1, cor211_instance,
               [](const Json& j, const SuiteConfig& c) {
                 return cor211_evaluation(j, c, KantorovichVariant::reciprocal);
               }});
  s.push_back({"cor211_paper", false, 1, cor211_instance,
               [](const Json& j, const SuiteConfig& c) { return cor211_evaluation(j, c, KantorovichVariant::paper); }});

  s.push_back({"dilation", true, 1,
               [convex](const TrialContext& ctx) -> std::optional<Json> {
                 const auto fs = functions_where(ctx.config, convex);
                 if (fs.empty()) return std::nullopt;
                 const Index n = pick_dim(ctx);
                 const double spread = ctx.config.spread;
                 return Json{{"f", pick(fs, ctx.rng)},
                             {"x", matrix_json(random_with_spectrum(n, spread / 100.0, spread, ctx.rng))},
                             {"c", matrix_json(random_contraction(n, ctx.rng))}};
               },
               [](const Json& j, const SuiteConfig& c) {
                 const BoundReport r =
                     dilation_block_bound(sym(j, "x"), matrix_from_json(j.at("c")), parse_function(j.at("f").get<std::string>()));
                 Evaluation e = bound_evaluation(r, c);
                 const double tol = 1e-9 * r.scale();
                 for (const char* key : {"dilation_midpoint_residual", "dilation_modulus_residual"}) {
                   const double res = std::get<double>(r.ingredients.at(key));
                   if (!(res <= tol)) e.violation = std::string(key) + " = " + std::to_string(res);
                 }
                 const double y_res = std::get<double>(r.ingredients.at("y_formula_residual"));
                 if (!(y_res <= 1e-8 * r.scale())) e.violation = "y_formula_residual = " + std::to_string(y_res);
                 return e;
               }});
  return s;
}

}  // namespace detail

inline const std::vector<SuiteSpec>& suites() {
  static const std::vector<SuiteSpec> all = detail::build_suites();
  return all;
}

inline const SuiteSpec& find_suite(const std::string& name) {
  for (const auto& s : suites())
    if (s.name == name) return s;
  throw ConfigError("unknown suite '" + name + "'");
}

// ---------------------------------------------------------------------------
// Running

struct Counterexample {
  std::uint64_t seed;
  int trial;
  double margin;
  std::optional<std::string> violation;
  /// Includes "suite"; feed to replay().
  Json instance;
};

struct SuiteRecord {
  static constexpr std::size_t kMaxCounterexamples = 10;

  std::string name;
  bool asserted = true;
  int trials_run = 0;
  int pass_count = 0;
  int skipped = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<std::uint64_t> worst_case_seed;
  std::vector<Counterexample> counterexamples;
  std::map<std::string, int> skip_reasons;
  std::optional<std::string> note;

  int failures() const { return trials_run - pass_count; }
  bool ok() const { return !asserted || failures() == 0; }
};

struct SuiteReport {
  SuiteConfig config;
  std::vector<SuiteRecord> records;
  double wall_time = 0.0;

  bool passed() const {
    return std::all_of(records.begin(), records.end(), [](const SuiteRecord& r) { return r.ok(); });
  }
  const SuiteRecord& record(const std::string& name) const {
    for (const auto& r : records)
      if (r.name == name) return r;
    throw ConfigError("suite '" + name + "' was not run");
  }
};

inline Evaluation replay(const Json& instance, const SuiteConfig& config = {}) {
  return find_suite(instance.at("suite").get<std::string>()).evaluate(instance, config);
}

inline SuiteRecord run_one_suite(const SuiteSpec& spec, const SuiteConfig& config) {
  SuiteRecord rec;
  rec.name = spec.name;
  rec.asserted = spec.asserted;
  const int total = config.trials * spec.trial_factor;
  for (int trial = 0; trial < total; ++trial) {
    const std::uint64_t seed = derive_seed(config.master_seed, spec.name, static_cast<std::uint64_t>(trial));
    Rng rng(seed);
    std::optional<Json> instance;
    Evaluation e;
    try {
      instance = spec.generate(TrialContext{config, trial, rng});
      if (!instance) {
        rec.note = "no applicable function or parameter in the configuration";
        break;
      }
      (*instance)["suite"] = spec.name;
      e = spec.evaluate(*instance, config);
    } catch (const Error& err) {
      ++rec.skipped;
      ++rec.skip_reasons[std::string(to_string(err.kind()))];
      continue;
    }
    ++rec.trials_run;
    if (e.pass()) ++rec.pass_count;
    if (e.margin < rec.worst_margin) {
      rec.worst_margin = e.margin;
      rec.worst_case_seed = seed;
    }
    if (!e.pass() && rec.counterexamples.size() < SuiteRecord::kMaxCounterexamples) {
      rec.counterexamples.push_back({seed, trial, e.margin, e.violation, std::move(*instance)});
    }
  }
  return rec;
}

inline SuiteReport run_suite(const SuiteConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report{config, {}, 0.0};
  for (const auto& spec : suites()) {
    if (!config.suites.empty() && std::find(config.suites.begin(), config.suites.end(), spec.name) == config.suites.end()) {
      continue;
    }
    report.records.push_back(run_one_suite(spec, config));
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace superquad
