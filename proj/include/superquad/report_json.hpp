#pragma once

// JSON report documents. Every command writes the same top-level shape:
//   {schema, command, inputs, eigenvalues, verdicts, ingredients, paper_targets,
//    erratum_notes, warnings}
// plus "suite" and "wall_time" for verify. Eigenvalue arrays are descending.

#include <string>
#include <vector>

#include "superquad/bounds.hpp"
#include "superquad/harness.hpp"
#include "superquad/json_io.hpp"
#include "superquad/sharp_constants.hpp"

namespace superquad {

constexpr int kReportSchemaVersion = 1;

inline Json verdict_json(const OrderVerdict& v) {
  Json j{{"pass", v.pass}, {"margin", number_json(v.margin)}, {"threshold", number_json(v.threshold)}};
  j["worst_index"] = v.worst_index ? Json(*v.worst_index) : Json(nullptr);
  return j;
}

/// Square symmetric matrices also carry their descending spectrum.
inline Json ingredient_json(const Ingredient& ing) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return number_json(v);
        } else if constexpr (std::is_same_v<T, Vector>) {
          return vector_json(v);
        } else if constexpr (std::is_same_v<T, Matrix>) {
          Json j{{"matrix", matrix_json(v)}};
          if (v.rows() == v.cols() && (v - v.transpose()).norm() <= 1e-12 * std::max(1.0, v.norm())) {
            j["eigenvalues"] = vector_json(eigenvalues(SymmetricMatrix(v)));
          }
          return j;
        } else {
          return v;
        }
      },
      ing);
}

inline Json ingredients_json(const Ingredients& ing) {
  Json j = Json::object();
  for (const auto& [key, value] : ing) j[key] = ingredient_json(value);
  return j;
}

inline Json gamma_json(const GammaResult& r) {
  return Json{{"m", number_json(r.m)},         {"M", number_json(r.M)},
              {"mu", number_json(r.mu)},       {"nu", number_json(r.nu)},
              {"t0", number_json(r.t0)},       {"gamma", number_json(r.gamma)},
              {"residual", number_json(r.residual)}, {"brackets", r.brackets},
              {"degenerate", r.degenerate}};
}

inline Json comparison_json(const ComparisonRecord& r) {
  return Json{{"id", r.id},
              {"bound_thm21_spectrum", vector_json(r.bound_thm21_spectrum)},
              {"bound_thm25_spectrum", vector_json(r.bound_thm25_spectrum)},
              {"tighter", to_string(r.tighter)}};
}

inline Json counterexample_json(const Counterexample& c) {
  Json j{{"seed", c.seed}, {"trial", c.trial}, {"margin", number_json(c.margin)}, {"instance", c.instance}};
  j["violation"] = c.violation ? Json(*c.violation) : Json(nullptr);
  return j;
}

inline Json record_json(const SuiteRecord& r) {
  Json cx = Json::array();
  for (const auto& c : r.counterexamples) cx.push_back(counterexample_json(c));
  Json j{{"name", r.name},
         {"asserted", r.asserted},
         {"trials_run", r.trials_run},
         {"pass_count", r.pass_count},
         {"skipped", r.skipped},
         {"skip_reasons", r.skip_reasons},
         {"counterexamples", std::move(cx)},
         {"ok", r.ok()}};
  j["worst_margin"] = r.trials_run > 0 ? number_json(r.worst_margin) : Json(nullptr);
  j["worst_case_seed"] = r.worst_case_seed ? Json(*r.worst_case_seed) : Json(nullptr);
  j["note"] = r.note ? Json(*r.note) : Json(nullptr);
  return j;
}

/// Builder for the common document shape.
class ReportDocument {
 public:
  explicit ReportDocument(std::string command) {
    doc_ = Json{{"schema", kReportSchemaVersion},
                {"command", std::move(command)},
                {"inputs", Json::object()},
                {"eigenvalues", Json::object()},
                {"verdicts", Json::object()},
                {"ingredients", Json::object()},
                {"paper_targets", Json::array()},
                {"erratum_notes", Json::array()},
                {"warnings", Json::array()}};
  }

  Json& inputs() { return doc_["inputs"]; }
  Json& ingredients() { return doc_["ingredients"]; }
  void eigenvalues(const std::string& key, const Vector& descending) { doc_["eigenvalues"][key] = vector_json(descending); }
  void verdict(const std::string& key, const OrderVerdict& v) { doc_["verdicts"][key] = verdict_json(v); }
  void verdict(const std::string& key, bool pass, double margin) {
    doc_["verdicts"][key] = Json{{"pass", pass}, {"margin", number_json(margin)}};
  }
  void paper_target(Json t) { doc_["paper_targets"].push_back(std::move(t)); }
  void erratum(const std::string& note) { doc_["erratum_notes"].push_back(note); }
  void warning(const std::string& note) { doc_["warnings"].push_back(note); }
  void set(const std::string& key, Json value) { doc_[key] = std::move(value); }

  /// Lhs and bound spectra, the verdict, all ingredients and the notes.
  void add_bound(const BoundReport& r) {
    eigenvalues("lhs", r.lhs_spectrum());
    eigenvalues("bound", r.bound_spectrum());
    Json v = verdict_json(r.verdict);
    v["normalized_margin"] = number_json(r.normalized_margin());
    v["mode"] = r.mode == ComparisonMode::loewner ? "loewner" : "eigenvalue_order";
    v["bound_side"] = r.side == BoundSide::upper ? "upper" : "lower";
    doc_["verdicts"][r.name] = std::move(v);
    Json& ing = ingredients();
    for (const auto& [key, value] : r.ingredients) ing[key] = ingredient_json(value);
    ing["lhs"] = ingredient_json(r.lhs.matrix());
    ing["bound"] = ingredient_json(r.bound.matrix());
    for (const auto& n : r.notes) erratum(n);
  }

  void add_sandwich(const SandwichReport& r) {
    eigenvalues("lhs", eigenvalues_of(r.lhs));
    eigenvalues("lower", eigenvalues_of(r.lower));
    eigenvalues("upper", eigenvalues_of(r.upper));
    verdict("sandwich_lower", r.lower_verdict);
    verdict("sandwich_upper", r.upper_verdict);
    Json& ing = ingredients();
    for (const auto& [key, value] : r.ingredients) ing[key] = ingredient_json(value);
    ing["variant"] = r.variant == CorrectionVariant::paper ? "paper" : "derived";
    ing["correction"] = number_json(r.correction_value);
    for (const auto& [key, m] : {std::pair<const char*, const OrthogonalMatrix*>{"u1", &r.u1}, {"u2", &r.u2},
                                 {"v1", &r.v1}, {"v2", &r.v2}}) {
      ing[key] = matrix_json(m->matrix());
    }
    ing["lhs"] = ingredient_json(r.lhs.matrix());
    ing["lower"] = ingredient_json(r.lower.matrix());
    ing["upper"] = ingredient_json(r.upper.matrix());
  }

  void add_suite(const SuiteReport& r) {
    Json records = Json::array();
    for (const auto& rec : r.records) {
      records.push_back(record_json(rec));
      verdict(rec.name, rec.failures() == 0, rec.trials_run > 0 ? rec.worst_margin : 0.0);
      doc_["verdicts"][rec.name]["asserted"] = rec.asserted;
      if (!rec.asserted && rec.failures() > 0) {
        erratum(rec.name + ": " + std::to_string(rec.failures()) + " of " + std::to_string(rec.trials_run) +
                " trials fail (collected, not asserted)");
      }
    }
    doc_["suite"] = Json{{"config", to_json(r.config)}, {"records", std::move(records)}, {"passed", r.passed()}};
    doc_["wall_time"] = r.wall_time;
  }

  const Json& json() const { return doc_; }
  std::string dump() const { return doc_.dump(2) + "\n"; }

 private:
  static Vector eigenvalues_of(const SymmetricMatrix& m) { return superquad::eigenvalues(m); }

  Json doc_;
};

}  // namespace superquad
