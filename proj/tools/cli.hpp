#pragma once

// Command dispatch for the superquad executable. Exit codes: 0 pass, 2 input or
// configuration error, 3 a verified inequality fails.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "superquad/superquad.hpp"

namespace superquad::cli {

constexpr int kExitPass = 0;
constexpr int kExitInput = 2;
constexpr int kExitFail = 3;

/// The inequality under test failed inside a construction (e.g. no conjugating
/// orthogonal exists); reported with exit code 3.
struct InequalityFailure : Error {
  using Error::Error;
};

struct BoundArgs {
  std::string theorem;
  std::string f;
  std::string alpha;
  std::string q;
  std::string p;
  std::string a, b, x, y, c, d;
  std::string variant;
  std::string out;
};

struct ConstantsArgs {
  std::string kind;
  std::string g;
  std::string p;
  std::string m;
  std::string M;
  std::string out;
};

struct VerifyArgs {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string dims;
  std::string suites;
  std::string config;
  std::string out;
};

/// SUPERQUAD_TOL replaces the default absolute tolerance.
inline ComparisonTolerance tolerance_from_env(std::vector<std::string>* notes = nullptr) {
  ComparisonTolerance tol = default_tolerance();
  if (const char* env = std::getenv("SUPERQUAD_TOL"); env && *env) {
    double v = 0.0;
    try {
      v = parse_real(env);
    } catch (const Error&) {
      throw InputError(std::string("SUPERQUAD_TOL is not a number: '") + env + "'");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("SUPERQUAD_TOL must be a non-negative number");
    tol.atol = v;
    if (notes) notes->push_back(std::string("atol overridden by SUPERQUAD_TOL = ") + env);
  }
  return tol;
}

inline void emit(const ReportDocument& doc, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << doc.dump();
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw InputError("cannot write '" + out_path + "'");
  f << doc.dump();
  out << "report written to " << out_path << "\n";
}

namespace detail {

inline double real_flag(const std::string& value, const char* name) {
  try {
    return parse_real(value);
  } catch (const Error&) {
    throw InputError(std::string("--") + name + " is not a number: '" + value + "'");
  }
}

inline SymmetricMatrix load_sym(const std::string& path, const char* name, ReportDocument& doc) {
  if (path.empty()) throw InputError(std::string("--") + name + " is required for this theorem");
  std::string warning;
  SymmetricMatrix m = load_symmetric_file(path, &warning);
  if (!warning.empty()) {
    doc.warning(std::string(name) + ": " + warning);
    std::cerr << "warning: " << name << ": " << warning << "\n";
  }
  doc.inputs()[name] = matrix_json(m);
  return m;
}

inline Matrix load_general(const std::string& path, const char* name, ReportDocument& doc) {
  if (path.empty()) throw InputError(std::string("--") + name + " is required for this theorem");
  Matrix m = load_matrix_file(path);
  doc.inputs()[name] = matrix_json(m);
  return m;
}

inline ScalarFunctionModel function_flag(const BoundArgs& a, ReportDocument& doc) {
  if (a.f.empty()) throw InputError("--f is required for theorem " + a.theorem);
  ScalarFunctionModel f = parse_function(a.f);
  doc.inputs()["f"] = f.specifier();
  return f;
}

inline double number_flag(const std::string& v, const char* name, std::optional<double> fallback,
                          ReportDocument& doc) {
  double value = 0.0;
  if (v.empty()) {
    if (!fallback) throw InputError(std::string("--") + name + " is required for this theorem");
    value = *fallback;
  } else {
    value = real_flag(v, name);
  }
  doc.inputs()[name] = value;
  return value;
}

/// Options that each theorem accepts; anything else given on the command line
/// is an error.
inline const std::map<std::string, std::set<std::string>>& allowed_flags() {
  static const std::map<std::string, std::set<std::string>> m{
      {"thm21", {"f", "alpha", "a", "b"}},
      {"thm25", {"f", "alpha", "a", "b", "c", "d"}},
      {"thm29", {"f", "alpha", "a", "b"}},
      {"cor23", {"q", "a", "b"}},
      {"cor24", {"q", "a", "b"}},
      {"cor210", {"f", "a", "b"}},
      {"cor211", {"p", "a", "b", "variant"}},
      {"sandwich", {"q", "x", "y", "a", "b", "variant"}},
      {"dilation", {"f", "x", "a", "c"}},
  };
  return m;
}

inline void check_flags(const BoundArgs& a) {
  const auto& allowed = allowed_flags().at(a.theorem);
  const std::pair<const char*, const std::string*> given[] = {
      {"f", &a.f}, {"alpha", &a.alpha}, {"q", &a.q}, {"p", &a.p}, {"a", &a.a},           {"b", &a.b},
      {"x", &a.x}, {"y", &a.y},         {"c", &a.c}, {"d", &a.d}, {"variant", &a.variant}};
  for (const auto& [name, value] : given) {
    if (!value->empty() && !allowed.count(name)) {
      throw InputError(std::string("--") + name + " does not apply to theorem " + a.theorem);
    }
  }
}

inline int verdict_exit(bool pass) { return pass ? kExitPass : kExitFail; }

}  // namespace detail

inline int cmd_bound(const BoundArgs& args, std::ostream& out) {
  detail::check_flags(args);
  std::vector<std::string> tol_notes;
  const ComparisonTolerance tol = tolerance_from_env(&tol_notes);
  ReportDocument doc("bound");
  doc.inputs()["theorem"] = args.theorem;
  for (const auto& n : tol_notes) doc.warning(n);
  const std::string& t = args.theorem;
  bool pass = true;

  try {
    if (t == "thm21" || t == "thm29") {
      const auto f = detail::function_flag(args, doc);
      const double alpha = detail::number_flag(args.alpha, "alpha", 0.5, doc);
      const auto a = detail::load_sym(args.a, "a", doc);
      const auto b = detail::load_sym(args.b, "b", doc);
      const BoundReport r = t == "thm21" ? concave_bound_S(f, a, b, alpha, tol) : convex_bound_T(f, a, b, alpha, tol);
      doc.add_bound(r);
      pass = r.verdict.pass;
    } else if (t == "thm25") {
      const auto f = detail::function_flag(args, doc);
      const auto a = detail::load_sym(args.a, "a", doc);
      if (!args.b.empty()) {
        if (!args.c.empty() || !args.d.empty()) throw InputError("thm25 takes either --b or a map --c/--d, not both");
        const double alpha = detail::number_flag(args.alpha, "alpha", 0.5, doc);
        const auto b = detail::load_sym(args.b, "b", doc);
        const BoundReport r = combine_pair_bound(f, a, b, alpha, tol);
        doc.add_bound(r);
        pass = r.verdict.pass;
      } else {
        if (!args.alpha.empty()) throw InputError("--alpha applies to thm25 only together with --b");
        const PositiveMapCD map{detail::load_general(args.c, "c", doc), detail::load_general(args.d, "d", doc)};
        const BoundReport r = phi_bound(f, map, a, tol);
        doc.add_bound(r);
        pass = r.verdict.pass;
      }
    } else if (t == "cor23" || t == "cor24") {
      const double q = detail::number_flag(args.q, "q", std::nullopt, doc);
      const auto a = detail::load_sym(args.a, "a", doc);
      const auto b = detail::load_sym(args.b, "b", doc);
      const BoundReport r = t == "cor23" ? cor_power_mean_reverse(a, b, q, tol) : cor_sum_lower(a, b, q, tol);
      doc.add_bound(r);
      pass = r.verdict.pass;
    } else if (t == "cor210") {
      const auto f = detail::function_flag(args, doc);
      const auto a = detail::load_sym(args.a, "a", doc);
      const auto b = detail::load_sym(args.b, "b", doc);
      const BoundReport r = cor_midpoint_convex(a, b, f, tol);
      doc.add_bound(r);
      pass = r.verdict.pass;
    } else if (t == "cor211") {
      const double p = detail::number_flag(args.p, "p", std::nullopt, doc);
      const std::string variant = args.variant.empty() ? "paper" : args.variant;
      if (variant != "paper" && variant != "reciprocal") {
        throw InputError("cor211 --variant must be paper or reciprocal");
      }
      doc.inputs()["variant"] = variant;
      const auto a = detail::load_sym(args.a, "a", doc);
      const auto b = detail::load_sym(args.b, "b", doc);
      const auto chosen = variant == "paper" ? KantorovichVariant::paper : KantorovichVariant::reciprocal;
      const BoundReport r = cor_power_convex(a, b, p, chosen, tol);
      doc.add_bound(r);
      const auto other = cor_power_convex(a, b, p,
                                          variant == "paper" ? KantorovichVariant::reciprocal : KantorovichVariant::paper, tol);
      doc.verdict(other.name, other.verdict);
      pass = r.verdict.pass;
    } else if (t == "sandwich") {
      if (!args.x.empty() && !args.a.empty()) throw InputError("give either --x or --a, not both");
      if (!args.y.empty() && !args.b.empty()) throw InputError("give either --y or --b, not both");
      const double q = detail::number_flag(args.q, "q", std::nullopt, doc);
      const std::string variant = args.variant.empty() ? "derived" : args.variant;
      if (variant != "paper" && variant != "derived") throw InputError("sandwich --variant must be paper or derived");
      doc.inputs()["variant"] = variant;
      const auto x = detail::load_sym(args.x.empty() ? args.a : args.x, "x", doc);
      const auto y = detail::load_sym(args.y.empty() ? args.b : args.y, "y", doc);
      const auto chosen = variant == "paper" ? CorrectionVariant::paper : CorrectionVariant::derived;
      const SandwichReport r = subadditivity_sandwich(x, y, q, chosen, tol);
      doc.add_sandwich(r);
      const SandwichReport other = subadditivity_sandwich(
          x, y, q, chosen == CorrectionVariant::paper ? CorrectionVariant::derived : CorrectionVariant::paper, tol);
      doc.verdict(std::string("sandwich_upper_") + (chosen == CorrectionVariant::paper ? "derived" : "paper"),
                  other.upper_verdict);
      pass = r.lower_verdict.pass && r.upper_verdict.pass;
      if (!r.upper_verdict.pass) {
        doc.set("counterexample", Json{{"x", matrix_json(x)},
                                       {"y", matrix_json(y)},
                                       {"q", q},
                                       {"variant", variant},
                                       {"lhs_spectrum", vector_json(eigenvalues(r.lhs))},
                                       {"upper_spectrum", vector_json(eigenvalues(r.upper))},
                                       {"margin", number_json(r.upper_verdict.margin)}});
      }
      if (chosen == CorrectionVariant::paper) {
        doc.erratum("the stated correction 2(l1(X+Y) - ln(X+Y))^q fails already for x = y = 1, q = 2");
      }
    } else if (t == "dilation") {
      if (!args.x.empty() && !args.a.empty()) throw InputError("give either --x or --a, not both");
      const auto f = detail::function_flag(args, doc);
      const auto x = detail::load_sym(args.x.empty() ? args.a : args.x, "x", doc);
      const Matrix c = detail::load_general(args.c, "c", doc);
      const BoundReport r = dilation_block_bound(x, c, f, tol);
      doc.add_bound(r);
      pass = r.verdict.pass;
    }
  } catch (const OrderError& e) {
    throw InequalityFailure(ErrorKind::order, e.what());
  }
  doc.set("pass", pass);
  emit(doc, args.out, out);
  return detail::verdict_exit(pass);
}

namespace detail {

/// The g accepted by `constants`: pow:P (t^P on (0, inf)), abs_pow:P (|t|^P),
/// abs:<registry function> (f(|t|)) or a registry function itself.
template <class Visitor>
auto with_g(const std::string& spec, Visitor&& v) {
  if (spec.empty()) throw InputError("--g is required for this kind");
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "pow") return v(PowerFunction{real_flag(tail, "g")});
  if (head == "abs_pow") return v(abs_power(real_flag(tail, "g")));
  if (head == "abs") return v(abs_composite(parse_function(tail)));
  return v(parse_function(spec));
}

}  // namespace detail

inline int cmd_constants(const ConstantsArgs& args, std::ostream& out) {
  ReportDocument doc("constants");
  doc.inputs()["kind"] = args.kind;
  const double m = detail::real_flag(args.m, "m");
  const double M = detail::real_flag(args.M, "M");
  doc.inputs()["m"] = m;
  doc.inputs()["M"] = M;
  Json& ing = doc.ingredients();

  if (args.kind == "kantorovich" || args.kind == "kantorovich_abs") {
    if (!args.g.empty()) throw InputError("--g does not apply to " + args.kind + "; use --p");
    const double p = detail::real_flag(args.p, "p");
    doc.inputs()["p"] = p;
    if (args.kind == "kantorovich") {
      ing["value"] = number_json(kantorovich_power(m, M, p));
      ing["gamma"] = gamma_json(gamma_constant(PowerFunction{p}, m, M));
    } else {
      ing["value"] = number_json(kantorovich_abs_power(m, M, p));
      if ((m > 0.0 || M < 0.0) && !superquad::detail::degenerate_interval(m, M)) {
        ing["gamma"] = gamma_json(gamma_constant(abs_power(p), m, M));
      }
    }
  } else if (args.kind == "gamma" || args.kind == "t0" || args.kind == "secant") {
    if (!args.p.empty()) throw InputError("--p does not apply to " + args.kind + "; use --g");
    doc.inputs()["g"] = args.g;
    detail::with_g(args.g, [&](const auto& g) {
      if (args.kind == "secant") {
        const SecantCoefficients s = secant_coeffs(g, m, M);
        ing["mu"] = number_json(s.mu);
        ing["nu"] = number_json(s.nu);
        ing["value"] = Json{number_json(s.mu), number_json(s.nu)};
        return 0;
      }
      if (args.kind == "t0" && !(m < M)) throw IntervalError("t0 needs m < M");
      const GammaResult r = gamma_constant(g, m, M);
      ing["gamma"] = gamma_json(r);
      ing["value"] = number_json(args.kind == "t0" ? r.t0 : r.gamma);
      ing["residual"] = number_json(r.residual);
      if (r.degenerate) doc.erratum("degenerate interval m = M: gamma = 1 by continuity");
      if (r.brackets > 1) {
        doc.warning(std::to_string(r.brackets) + " roots found; the largest constant is reported");
      }
      return 0;
    });
  } else {
    throw InputError("unknown constants kind '" + args.kind + "'");
  }
  // Nothing is compared here; reaching this point means the value was computed.
  doc.set("pass", true);
  emit(doc, args.out, out);
  return kExitPass;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  SuiteConfig config;
  if (!args.config.empty()) {
    Json j;
    try {
      j = read_json_file(args.config);
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
    config = suite_config_from_json(j, config);
  }
  if (args.seed) config.master_seed = *args.seed;
  if (args.trials) config.trials = *args.trials;
  if (!args.dims.empty()) {
    config.dims.clear();
    for (const auto& d : split_list(args.dims)) {
      try {
        std::size_t used = 0;
        const int v = std::stoi(d, &used);
        if (used != d.size()) throw std::invalid_argument(d);
        config.dims.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError("--dims entry '" + d + "' is not an integer");
      }
    }
  }
  if (!args.suites.empty()) config.suites = split_list(args.suites);
  config.validate();

  const SuiteReport report = run_suite(config);
  ReportDocument doc("verify");
  doc.inputs() = to_json(config);
  doc.add_suite(report);
  doc.set("pass", report.passed());
  emit(doc, args.out, out);
  return detail::verdict_exit(report.passed());
}

inline int cmd_reproduce(const std::string& out_path, std::ostream& out) {
  const Reproduction r = reproduce_paper();
  ReportDocument doc = reproduction_document(r);
  doc.set("pass", r.passed());
  emit(doc, out_path, out);
  return detail::verdict_exit(r.passed());
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Eigenvalue and Loewner bounds for superquadratic matrix functions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "superquad 1.0");

  BoundArgs bound;
  auto* b = app.add_subcommand("bound", "Evaluate one bound on matrices read from JSON files");
  std::vector<std::string> theorems;
  for (const auto& [name, flags] : detail::allowed_flags()) theorems.push_back(name);
  b->add_option("--theorem", bound.theorem, "Which bound")->required()->check(CLI::IsMember(theorems));
  b->add_option("--f", bound.f, "Function specifier, e.g. neg_pow_q:4/3");
  b->add_option("--alpha", bound.alpha, "Convex weight in [0, 1] (default 1/2)");
  b->add_option("--q", bound.q, "Exponent q in [1, 2]");
  b->add_option("--p", bound.p, "Exponent p >= 2");
  b->add_option("--a", bound.a, "Matrix file for A");
  b->add_option("--b", bound.b, "Matrix file for B");
  b->add_option("--x", bound.x, "Matrix file for X");
  b->add_option("--y", bound.y, "Matrix file for Y");
  b->add_option("--c", bound.c, "Matrix file for C (map block or contraction)");
  b->add_option("--d", bound.d, "Matrix file for D (map block)");
  b->add_option("--variant", bound.variant, "paper | derived (sandwich), paper | reciprocal (cor211)");
  b->add_option("--out", bound.out, "Write the report here instead of stdout");

  ConstantsArgs consts;
  auto* c = app.add_subcommand("constants", "Sharp reverse Jensen constants");
  c->add_option("--kind", consts.kind, "Which constant")
      ->required()
      ->check(CLI::IsMember({"gamma", "kantorovich", "kantorovich_abs", "t0", "secant"}));
  c->add_option("--g", consts.g, "pow:P, abs_pow:P, abs:<function> or a function specifier");
  c->add_option("--p", consts.p, "Exponent for the Kantorovich kinds");
  c->add_option("--m", consts.m, "Left endpoint")->required();
  c->add_option("--M", consts.M, "Right endpoint")->required();
  c->add_option("--out", consts.out, "Write the report here instead of stdout");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Run the randomized property suites");
  v->add_option("--seed", verify.seed, "Master seed");
  v->add_option("--trials", verify.trials, "Trials per bound suite");
  v->add_option("--dims", verify.dims, "Comma-separated dimensions");
  v->add_option("--suites", verify.suites, "Comma-separated subset of suites");
  v->add_option("--config", verify.config, "Suite config JSON");
  v->add_option("--out", verify.out, "Write the report here instead of stdout");

  std::string reproduce_out;
  auto* r = app.add_subcommand("reproduce", "Recompute the reference numeric examples");
  r->add_option("--out", reproduce_out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    if (*b) return cmd_bound(bound, out);
    if (*c) return cmd_constants(consts, out);
    if (*v) return cmd_verify(verify, out);
    return cmd_reproduce(reproduce_out, out);
  } catch (const InequalityFailure& e) {
    err << "inequality failed: " << e.what() << "\n";
    return kExitFail;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace superquad::cli
