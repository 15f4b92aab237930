#pragma once

// Dense real symmetric linear algebra: eigendecomposition, spectral functional
// calculus, Loewner and eigenvalue-order comparisons, and the orthogonal
// matrices that realize those comparisons constructively.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <type_traits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "superquad/errors.hpp"

namespace superquad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace detail {

inline std::string echo(const Matrix& m) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Index i = 0; i < m.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace detail

/// Dense real symmetric matrix. Construction symmetrizes the input as
/// (M + M^T) / 2 and rejects genuinely non-symmetric data.
class SymmetricMatrix {
 public:
  static constexpr double kAsymmetryTolerance = 1e-8;

  explicit SymmetricMatrix(const Matrix& m) {
    if (m.rows() != m.cols()) {
      throw DimensionError("matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                           ", expected square");
    }
    if (m.rows() < 1) throw DimensionError("matrix dimension must be at least 1");
    if (!m.allFinite()) throw DomainError("matrix has non-finite entries: " + detail::echo(m));
    const double asym = (m - m.transpose()).norm();
    if (asym > kAsymmetryTolerance * std::max(1.0, m.norm())) {
      throw DomainError("matrix is not symmetric (||M - M^T||_F = " + std::to_string(asym) + ")");
    }
    m_ = 0.5 * (m + m.transpose());
  }

  SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SymmetricMatrix(from_rows(rows)) {}

  static SymmetricMatrix identity(Index n) { return SymmetricMatrix(Matrix::Identity(n, n)); }
  static SymmetricMatrix zero(Index n) { return SymmetricMatrix(Matrix::Zero(n, n)); }
  static SymmetricMatrix scalar(Index n, double c) { return SymmetricMatrix(c * Matrix::Identity(n, n)); }
  static SymmetricMatrix diagonal(const Vector& d) { return SymmetricMatrix(Matrix(d.asDiagonal())); }
  static SymmetricMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(Vector::Map(std::data(d), static_cast<Index>(d.size())));
  }

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  double norm_fro() const { return m_.norm(); }
  /// Spectral norm, i.e. the largest eigenvalue magnitude.
  double norm_2() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

  /// Q^T M Q.
  SymmetricMatrix congruence(const Matrix& q) const {
    if (q.rows() != dim()) throw DimensionError("congruence: row count does not match matrix dimension");
    return SymmetricMatrix(q.transpose() * m_ * q);
  }

  SymmetricMatrix block(Index start, Index size) const {
    if (start < 0 || size < 1 || start + size > dim()) throw DimensionError("block out of range");
    return SymmetricMatrix(Matrix(m_.block(start, start, size, size)));
  }

  friend SymmetricMatrix operator+(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    check_same_dim(a, b);
    return SymmetricMatrix(Matrix(a.m_ + b.m_));
  }
  friend SymmetricMatrix operator-(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    check_same_dim(a, b);
    return SymmetricMatrix(Matrix(a.m_ - b.m_));
  }
  friend SymmetricMatrix operator-(const SymmetricMatrix& a) { return SymmetricMatrix(Matrix(-a.m_)); }
  friend SymmetricMatrix operator*(double s, const SymmetricMatrix& a) { return SymmetricMatrix(Matrix(s * a.m_)); }
  friend SymmetricMatrix operator*(const SymmetricMatrix& a, double s) { return s * a; }
  friend SymmetricMatrix operator/(const SymmetricMatrix& a, double s) { return SymmetricMatrix(Matrix(a.m_ / s)); }

  /// Adds c * I.
  SymmetricMatrix shifted(double c) const {
    return SymmetricMatrix(Matrix(m_ + c * Matrix::Identity(dim(), dim())));
  }

  static void check_same_dim(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.dim() != b.dim()) {
      throw DimensionError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
  }

 private:
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Index>(rows.size());
    Matrix m(n, n);
    Index i = 0;
    for (const auto& row : rows) {
      if (static_cast<Index>(row.size()) != n) throw DimensionError("ragged row in matrix literal");
      Index j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  Matrix m_;
};

/// a (+) b as a block-diagonal matrix.
inline SymmetricMatrix direct_sum(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  Matrix m = Matrix::Zero(a.dim() + b.dim(), a.dim() + b.dim());
  m.topLeftCorner(a.dim(), a.dim()) = a.matrix();
  m.bottomRightCorner(b.dim(), b.dim()) = b.matrix();
  return SymmetricMatrix(m);
}

/// Eigenvalues sorted descending, with the matching orthonormal eigenvector
/// frame in the columns of `frame`.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix frame;
};

struct SpectralRange {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

struct ComparisonTolerance {
  double atol = 1e-9;
  double rtol = 1e-9;
};

struct OrderVerdict {
  bool pass = false;
  /// Signed: >= 0 means the inequality holds exactly.
  double margin = 0.0;
  /// The verdict passes iff margin >= -threshold.
  double threshold = 0.0;
  /// Eigenvalue index (descending order) where the margin is attained.
  std::optional<std::size_t> worst_index;
};

/// Square matrix with orthonormal columns, validated on construction.
class OrthogonalMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit OrthogonalMatrix(Matrix q) : q_(std::move(q)) {
    if (q_.rows() != q_.cols() || q_.rows() < 1) throw DimensionError("orthogonal matrix must be square");
    const double residual = orthogonality_residual(q_);
    if (!(residual <= kTolerance)) {
      throw ComputationError("matrix is not orthogonal (||Q^T Q - I||_F = " + std::to_string(residual) + ")");
    }
  }

  static double orthogonality_residual(const Matrix& q) {
    return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
  }

  Index dim() const noexcept { return q_.rows(); }
  const Matrix& matrix() const noexcept { return q_; }
  OrthogonalMatrix transpose() const { return OrthogonalMatrix(Matrix(q_.transpose())); }

  friend OrthogonalMatrix operator*(const OrthogonalMatrix& a, const OrthogonalMatrix& b) {
    return OrthogonalMatrix(Matrix(a.q_ * b.q_));
  }

 private:
  Matrix q_;
};

inline SpectralDecomposition eigh(const SymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  if (es.info() != Eigen::Success) {
    throw ComputationError("eigensolver did not converge for " + detail::echo(m.matrix()));
  }
  // Eigen sorts ascending.
  return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

inline Vector eigenvalues(const SymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ComputationError("eigensolver did not converge for " + detail::echo(m.matrix()));
  }
  return es.eigenvalues().reverse();
}

inline SpectralRange spectral_range(const SymmetricMatrix& m) {
  const Vector ev = eigenvalues(m);
  return {ev(ev.size() - 1), ev(0)};
}

/// Spectral functional calculus frame * diag(f(lambda_i)) * frame^T for any
/// callable double -> double.
template <class F>
  requires std::is_invocable_r_v<double, F, double>
SymmetricMatrix apply_function(F&& f, const SymmetricMatrix& m) {
  const SpectralDecomposition sd = eigh(m);
  Vector fv(sd.eigenvalues.size());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(sd.eigenvalues(i));
  if (!fv.allFinite()) throw DomainError("function value is not finite on the spectrum of " + detail::echo(m.matrix()));
  return SymmetricMatrix(Matrix(sd.frame * fv.asDiagonal() * sd.frame.transpose()));
}

/// Tolerance below zero at which eigenvalues of a nominally PSD matrix are
/// treated as solver noise and clamped.
inline double psd_clamp_tolerance(const SymmetricMatrix& m) { return 1e-10 * std::max(1.0, m.norm_2()); }

/// |m| = (m^2)^{1/2}.
inline SymmetricMatrix matrix_abs(const SymmetricMatrix& m) {
  return apply_function([](double t) { return std::abs(t); }, m);
}

inline SymmetricMatrix sqrt_psd(const SymmetricMatrix& m) {
  const double tol = psd_clamp_tolerance(m);
  const SpectralDecomposition sd = eigh(m);
  const double lowest = sd.eigenvalues(sd.eigenvalues.size() - 1);
  if (lowest < -tol) {
    throw NotPsdError("matrix is not positive semi-definite: smallest eigenvalue " + std::to_string(lowest) +
                      " below -" + std::to_string(tol));
  }
  const Vector root = sd.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return SymmetricMatrix(Matrix(sd.frame * root.asDiagonal() * sd.frame.transpose()));
}

/// Real power t^p of a PSD matrix with the same clamping rule as sqrt_psd.
inline SymmetricMatrix pow_psd(const SymmetricMatrix& m, double p) {
  const double tol = psd_clamp_tolerance(m);
  return apply_function(
      [&](double t) {
        if (t < -tol) throw NotPsdError("matrix power of a matrix with eigenvalue " + std::to_string(t));
        return std::pow(std::max(t, 0.0), p);
      },
      m);
}

/// The smallest singular value of a symmetric matrix, min |lambda_i|.
inline double smallest_singular_value(const SymmetricMatrix& m) { return eigenvalues(m).cwiseAbs().minCoeff(); }

inline double smallest_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().minCoeff();
}

inline double spectral_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().maxCoeff();
}

inline ComparisonTolerance default_tolerance() { return {}; }

/// h <= k in the Loewner order: margin is lambda_min(k - h).
inline OrderVerdict loewner_leq(const SymmetricMatrix& h, const SymmetricMatrix& k,
                                const ComparisonTolerance& tol = default_tolerance()) {
  SymmetricMatrix::check_same_dim(h, k);
  const Vector ev = eigenvalues(k - h);
  OrderVerdict v;
  v.margin = ev(ev.size() - 1);
  v.threshold = tol.atol + tol.rtol * ev.cwiseAbs().maxCoeff();
  v.pass = v.margin >= -v.threshold;
  v.worst_index = static_cast<std::size_t>(ev.size() - 1);
  return v;
}

/// Entrywise comparison of two descending spectra.
inline OrderVerdict spectrum_leq(const Vector& lower, const Vector& upper,
                                 const ComparisonTolerance& tol = default_tolerance()) {
  if (lower.size() != upper.size()) throw DimensionError("spectrum length mismatch");
  const Vector diff = upper - lower;
  Index at = 0;
  OrderVerdict v;
  v.margin = diff.minCoeff(&at);
  v.worst_index = static_cast<std::size_t>(at);
  v.threshold = tol.atol + tol.rtol * std::max(lower.cwiseAbs().maxCoeff(), upper.cwiseAbs().maxCoeff());
  v.pass = v.margin >= -v.threshold;
  return v;
}

/// lambda_j(h) <= lambda_j(k) for every j, eigenvalues taken descending.
inline OrderVerdict eig_order_leq(const SymmetricMatrix& h, const SymmetricMatrix& k,
                                  const ComparisonTolerance& tol = default_tolerance()) {
  SymmetricMatrix::check_same_dim(h, k);
  return spectrum_leq(eigenvalues(h), eigenvalues(k), tol);
}

/// frame(k) * frame(h)^T without checking the eigenvalue order. Conjugating k by
/// the result lines up the eigenvectors of k with those of h.
inline OrthogonalMatrix aligning_orthogonal(const SymmetricMatrix& h, const SymmetricMatrix& k) {
  SymmetricMatrix::check_same_dim(h, k);
  return OrthogonalMatrix(Matrix(eigh(k).frame * eigh(h).frame.transpose()));
}

/// Q with h <= Q^T k Q, which exists exactly when lambda(h) <= lambda(k)
/// entrywise.
inline OrthogonalMatrix conjugating_orthogonal(const SymmetricMatrix& h, const SymmetricMatrix& k,
                                               const ComparisonTolerance& tol = default_tolerance()) {
  const OrderVerdict v = eig_order_leq(h, k, tol);
  if (!v.pass) {
    throw OrderError("eigenvalue order fails at index " + std::to_string(*v.worst_index) + " (margin " +
                     std::to_string(v.margin) + ")");
  }
  return aligning_orthogonal(h, k);
}

/// W = U V^T from the SVD z = U S V^T, so that z z^T = W (z^T z) W^T.
inline OrthogonalMatrix congruence_orthogonal(const Matrix& z) {
  if (z.rows() != z.cols() || z.rows() < 1) throw DimensionError("congruence_orthogonal needs a square matrix");
  Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return OrthogonalMatrix(Matrix(svd.matrixU() * svd.matrixV().transpose()));
}

inline double congruence_residual(const Matrix& z, const OrthogonalMatrix& w) {
  const Matrix& q = w.matrix();
  return (z * z.transpose() - q * (z.transpose() * z) * q.transpose()).norm();
}

}  // namespace superquad
