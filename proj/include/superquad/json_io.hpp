#pragma once

// JSON conversions for matrices and vectors, and the {"matrix": [[...]]} file
// format. Doubles round-trip exactly (shortest representation); non-finite
// values are written as the strings "inf", "-inf" and "nan".

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "superquad/errors.hpp"
#include "superquad/linalg.hpp"

namespace superquad {

using Json = nlohmann::json;

inline Json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InputError("expected a number, got " + j.dump());
}

inline Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number_json(v(i)));
  return out;
}

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(number_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json matrix_json(const SymmetricMatrix& m) { return matrix_json(m.matrix()); }

inline Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number_from_json(j[i]);
  return v;
}

/// Rectangular array of rows of finite numbers.
inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw InputError("matrix rows must be non-empty arrays");
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw InputError("matrix rows must all have length " + std::to_string(cols));
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw InputError("matrix entries must be numbers");
      const double v = j[i][k].get<double>();
      if (!std::isfinite(v)) throw InputError("matrix entries must be finite");
      m(static_cast<Index>(i), static_cast<Index>(k)) = v;
    }
  }
  return m;
}

constexpr double kLoadSymmetryTolerance = 1e-8;

/// Square and symmetric within 1e-8 relative; small asymmetry is averaged away
/// and reported through `warning`.
inline SymmetricMatrix symmetric_from_json(const Json& j, std::string* warning = nullptr) {
  const Matrix m = matrix_from_json(j);
  if (m.rows() != m.cols()) {
    throw InputError("matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected square");
  }
  const double asym = (m - m.transpose()).norm();
  if (asym > kLoadSymmetryTolerance * std::max(1.0, m.norm())) {
    throw InputError("matrix is not symmetric (||M - M^T||_F = " + std::to_string(asym) + ")");
  }
  if (asym > 0.0 && warning) *warning = "matrix symmetrized on load (||M - M^T||_F = " + std::to_string(asym) + ")";
  return SymmetricMatrix(Matrix(0.5 * (m + m.transpose())));
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline const Json& matrix_field(const Json& doc, const std::string& path) {
  if (!doc.is_object() || !doc.contains("matrix")) throw InputError("'" + path + "' has no \"matrix\" field");
  return doc.at("matrix");
}

inline SymmetricMatrix load_symmetric_file(const std::string& path, std::string* warning = nullptr) {
  const Json doc = read_json_file(path);
  try {
    return symmetric_from_json(matrix_field(doc, path), warning);
  } catch (const InputError& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

/// General (possibly non-symmetric) square matrix, e.g. a contraction.
inline Matrix load_matrix_file(const std::string& path) {
  const Json doc = read_json_file(path);
  try {
    return matrix_from_json(matrix_field(doc, path));
  } catch (const InputError& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

}  // namespace superquad
