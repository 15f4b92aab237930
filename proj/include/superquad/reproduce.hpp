#pragma once

// The three 2x2 reference example sets: seven eigenvalue pairs and two
// "which estimate is tighter" verdicts. Each pair is computed twice, through the
// library (eigensolver) and through closed_form (characteristic polynomial and
// Sylvester's formula), and the two paths must agree to 1e-10.

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "superquad/bounds.hpp"
#include "superquad/closed_form_2x2.hpp"
#include "superquad/harness.hpp"
#include "superquad/report_json.hpp"

namespace superquad {

constexpr double kPaperTolerance = 1e-3;
constexpr double kPathAgreementTolerance = 1e-10;

struct PaperTarget {
  std::string id;
  std::string description;
  /// Descending; the reference values are listed ascending.
  Vector expected;
  Vector computed;
  Vector closed_form;
  double abs_error = 0.0;
  double path_agreement = 0.0;

  bool pass() const { return abs_error <= kPaperTolerance && path_agreement <= kPathAgreementTolerance; }
};

struct ClassificationTarget {
  std::string id;
  Tighter expected;
  ComparisonRecord record;

  bool pass() const { return record.tighter == expected; }
};

struct Reproduction {
  std::vector<PaperTarget> targets;
  std::vector<ClassificationTarget> classifications;

  bool passed() const {
    return std::all_of(targets.begin(), targets.end(), [](const auto& t) { return t.pass(); }) &&
           std::all_of(classifications.begin(), classifications.end(), [](const auto& c) { return c.pass(); });
  }
};

namespace detail {

inline Vector sorted_desc(Vector v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

inline Vector closed_spectrum(const closed_form::M2& m) {
  const auto ev = closed_form::eigenvalues(m);
  return Vector{{ev[0], ev[1]}};
}

inline PaperTarget make_target(std::string id, std::string description, Vector expected, const Vector& computed,
                               const closed_form::M2& closed) {
  PaperTarget t{std::move(id), std::move(description), sorted_desc(std::move(expected)), sorted_desc(computed),
                closed_spectrum(closed)};
  t.abs_error = (t.computed - t.expected).cwiseAbs().maxCoeff();
  t.path_agreement = (t.computed - t.closed_form).cwiseAbs().maxCoeff();
  return t;
}

inline Vector negated(const Vector& descending) { return Vector(-descending.reverse()); }

/// (A^q + B^q)/2 - (max l1 - min ln)^q I, the negated map bound for f = -t^q.
inline closed_form::M2 closed_thm25(const closed_form::M2& a, const closed_form::M2& b, double q) {
  const auto ea = closed_form::eigenvalues(a);
  const auto eb = closed_form::eigenvalues(b);
  const double range = std::max(ea[0], eb[0]) - std::min(ea[1], eb[1]);
  return 0.5 * (closed_form::power(a, q) + closed_form::power(b, q)) - std::pow(range, q) * closed_form::M2::Identity();
}

/// (A^q + B^q)/2 - |(A-B)/2|^q - ((l1(A)-ln(A))^q + (l1(B)-ln(B))^q)/2 I.
inline closed_form::M2 closed_thm21(const closed_form::M2& a, const closed_form::M2& b, double q) {
  const double ranges = std::pow(closed_form::spread(a), q) + std::pow(closed_form::spread(b), q);
  return 0.5 * (closed_form::power(a, q) + closed_form::power(b, q)) - closed_form::abs_power(0.5 * (a - b), q) -
         0.5 * ranges * closed_form::M2::Identity();
}

}  // namespace detail

inline Reproduction reproduce_paper() {
  using closed_form::M2;
  Reproduction out;

  {
    const double q = 1.5;
    const M2 a2{{5, -1}, {-1, 5}};
    const M2 b2{{2, 0}, {0, 4}};
    const SymmetricMatrix a{Matrix(a2)};
    const SymmetricMatrix b{Matrix(b2)};
    out.targets.push_back(detail::make_target(
        "set1_power_mean", "spectrum of (A^q + B^q)/2, q = 3/2", Vector{{6.266, 10.4967}},
        eigenvalues(0.5 * (pow_psd(a, q) + pow_psd(b, q))),
        0.5 * (closed_form::power(a2, q) + closed_form::power(b2, q))));
    out.targets.push_back(detail::make_target("set1_mean_power", "spectrum of ((A + B)/2)^q, q = 3/2",
                                              Vector{{5.9754, 10.2125}}, eigenvalues(pow_psd(0.5 * (a + b), q)),
                                              closed_form::power(0.5 * (a2 + b2), q)));
    const BoundReport r = cor_power_mean_reverse(a, b, q);
    out.targets.push_back(detail::make_target(
        "set1_reverse_power_mean",
        "spectrum of (A^q + B^q)/2 - |(A - B)/2|^q - ((l1(A) - ln(A))^q + (l1(B) - ln(B))^q)/2 I, q = 3/2",
        Vector{{2.1248, 6.5921}},
        eigenvalues(SymmetricMatrix(std::get<Matrix>(r.ingredients.at("rearranged_lower_estimate")))),
        detail::closed_thm21(a2, b2, q)));
  }

  const double q = 4.0 / 3.0;
  const ScalarFunctionModel f = make_function("neg_pow_q", q);
  struct Set {
    const char* tag;
    M2 a;
    M2 b;
    Vector thm25;
    Vector thm21;
    Tighter expected;
  };
  const Set sets[] = {
      {"set2", M2{{5, -1}, {-1, 5}}, M2{{4, 1}, {1, 5}}, Vector{{3.9202, 5.0212}}, Vector{{3.6099, 4.9944}},
       Tighter::thm25},
      {"set3", M2{{9, -1}, {-1, 8}}, M2{{5, 1}, {1, 5}}, Vector{{2.3178, 3.7477}}, Vector{{6.6286, 9.4128}},
       Tighter::thm21},
  };
  for (const Set& s : sets) {
    const SymmetricMatrix a{Matrix(s.a)};
    const SymmetricMatrix b{Matrix(s.b)};
    const BoundReport pair = combine_pair_bound(f, a, b, 0.5);
    const BoundReport conc = concave_bound_S(f, a, b, 0.5);
    out.targets.push_back(detail::make_target(
        std::string(s.tag) + "_thm25", "negated map bound (A^q + B^q)/2 - (max l1 - min ln)^q, f = -t^(4/3), alpha = 1/2",
        s.thm25, detail::negated(pair.bound_spectrum()), detail::closed_thm25(s.a, s.b, q)));
    out.targets.push_back(detail::make_target(
        std::string(s.tag) + "_thm21", "negated concave bound -S, f = -t^(4/3), alpha = 1/2", s.thm21,
        detail::negated(conc.bound_spectrum()), detail::closed_thm21(s.a, s.b, q)));
    out.classifications.push_back({std::string(s.tag) + "_tighter", s.expected, compare_estimates(f, a, b, 0.5, s.tag)});
  }
  return out;
}

inline ReportDocument reproduction_document(const Reproduction& r) {
  ReportDocument doc("reproduce");
  doc.inputs() = Json{{"paper_tolerance", kPaperTolerance}, {"path_agreement_tolerance", kPathAgreementTolerance}};
  for (const auto& t : r.targets) {
    doc.eigenvalues(t.id, t.computed);
    doc.paper_target(Json{{"id", t.id},
                          {"description", t.description},
                          {"expected", vector_json(t.expected)},
                          {"computed", vector_json(t.computed)},
                          {"closed_form", vector_json(t.closed_form)},
                          {"abs_error", t.abs_error},
                          {"path_agreement", t.path_agreement},
                          {"pass", t.pass()}});
    doc.verdict(t.id, t.pass(), kPaperTolerance - t.abs_error);
  }
  for (const auto& c : r.classifications) {
    doc.paper_target(Json{{"id", c.id},
                          {"description", "which concave upper bound is entrywise smaller"},
                          {"expected", to_string(c.expected)},
                          {"computed", to_string(c.record.tighter)},
                          {"pass", c.pass()}});
    doc.ingredients()[c.id] = comparison_json(c.record);
    doc.verdict(c.id, c.pass(), c.pass() ? 0.0 : -1.0);
  }
  doc.erratum("reference tuples are listed ascending; expected and computed values here are descending");
  doc.erratum(
      "map bound for a pair uses C = sqrt(1-alpha) I, D = sqrt(alpha) I; the stated C = alpha I, D = (1-alpha) I is "
      "not unital");
  return doc;
}

}  // namespace superquad
