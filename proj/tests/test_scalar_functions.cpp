#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "superquad/scalar_functions.hpp"

using namespace superquad;

namespace {

std::vector<ScalarFunctionModel> registry() {
  return {make_function("pow_p", 2.0),       make_function("pow_p", 2.5),     make_function("pow_p", 3.0),
          make_function("neg_pow_q", 1.0),   make_function("neg_pow_q", 1.25), make_function("neg_pow_q", 1.5),
          make_function("neg_pow_q", 2.0),   make_function("neg_root_sum", 0.5), make_function("neg_root_sum", 1.0),
          make_function("neg_root_sum", 0.2), make_function("x2_log"),          make_function("square")};
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace

TEST(ScalarFunction, RegistryExamples) {
  const auto p2 = make_function("pow_p", 2.0);
  EXPECT_DOUBLE_EQ(p2.value(3), 9.0);
  EXPECT_DOUBLE_EQ(p2.derivative(3), 6.0);
  EXPECT_TRUE(p2.is_convex_increasing_positive());
  const auto q = make_function("neg_pow_q", 1.5);
  EXPECT_DOUBLE_EQ(q.value(4), -8.0);
  EXPECT_TRUE(q.is_concave_decreasing());
  EXPECT_NEAR(make_function("x2_log").value(std::exp(1.0)), std::exp(2.0), 1e-13);
  EXPECT_DOUBLE_EQ(make_function("neg_root_sum", 1.0).value(3), -4.0);
  EXPECT_NEAR(make_function("neg_root_sum", 0.5).value(4), -std::sqrt(17.0), 1e-14);
}

TEST(ScalarFunction, ParameterRanges) {
  EXPECT_THROW(make_function("neg_pow_q", 2.5), ParameterError);
  EXPECT_THROW(make_function("neg_pow_q", 0.5), ParameterError);
  EXPECT_THROW(make_function("pow_p", 1.5), ParameterError);
  EXPECT_THROW(make_function("neg_root_sum", 0.0), ParameterError);
  EXPECT_THROW(make_function("neg_root_sum", 1.5), ParameterError);
  EXPECT_THROW(make_function("pow_p"), ParameterError);
  EXPECT_THROW(make_function("x2_log", 1.0), ParameterError);
  EXPECT_THROW(make_function("cosh"), ParameterError);
  EXPECT_THROW(make_function("pow_p", std::nan("")), ParameterError);
}

TEST(ScalarFunction, ParsesRationalsAtFullPrecision) {
  EXPECT_EQ(parse_real("4/3"), 4.0 / 3.0);
  EXPECT_EQ(parse_real("1.5"), 1.5);
  EXPECT_THROW(parse_real("1/0"), ParameterError);
  EXPECT_THROW(parse_real("abc"), ParameterError);
  EXPECT_THROW(parse_real(""), ParameterError);
  const auto f = parse_function("neg_pow_q:4/3");
  EXPECT_EQ(f.param(), 4.0 / 3.0);
  EXPECT_EQ(parse_function(f.specifier()).param(), f.param());
  EXPECT_EQ(parse_function("x2_log").specifier(), "x2_log");
}

TEST(ScalarFunction, DerivativesMatchFiniteDifferences) {
  for (const auto& f : registry()) {
    for (double t : {0.3, 0.9, 1.7, 4.0, 9.5}) {
      const double h = 1e-5 * std::max(1.0, t);
      const double d1 = (f.value(t + h) - f.value(t - h)) / (2 * h);
      const double d2 = (f.derivative(t + h) - f.derivative(t - h)) / (2 * h);
      EXPECT_NEAR(f.derivative(t), d1, 1e-6 * std::max(1.0, std::abs(d1))) << f.specifier() << " t=" << t;
      EXPECT_NEAR(f.second_derivative(t), d2, 1e-5 * std::max(1.0, std::abs(d2))) << f.specifier() << " t=" << t;
    }
  }
}

TEST(ScalarFunction, DeclaredShapeHoldsOnShapeRegion) {
  for (const auto& f : registry()) {
    const auto fl = f.flags();
    for (double t : grid(std::max(fl.shape_region_lo, 1e-3), 20.0, 200)) {
      if (fl.curvature == Curvature::convex) {
        EXPECT_GE(f.second_derivative(t), -1e-12) << f.specifier();
      } else {
        EXPECT_LE(f.second_derivative(t), 1e-12) << f.specifier();
      }
      if (fl.monotonicity == Monotonicity::increasing) {
        EXPECT_GE(f.derivative(t), -1e-12) << f.specifier();
      } else {
        EXPECT_LE(f.derivative(t), 1e-12) << f.specifier();
      }
      if (fl.positive) {
        EXPECT_GE(f.value(t), 0.0);
      }
    }
  }
}

TEST(ScalarFunction, X2LogIsNotConvexIncreasingNearZero) {
  const auto f = make_function("x2_log");
  EXPECT_LT(f.derivative(0.3), 0.0);
  EXPECT_LT(f.second_derivative(0.1), 0.0);
  EXPECT_LT(f.value(0.5), 0.0);
  EXPECT_FALSE(f.is_convex_increasing_positive());
  EXPECT_FALSE(f.is_concave_decreasing());
  EXPECT_NEAR(f.flags().shape_region_lo, std::exp(-0.5), 1e-15);
  EXPECT_NEAR(f.derivative(std::exp(-0.5)), 0.0, 1e-15);
}

TEST(SuperquadraticGap, SquareIsTheEqualityCase) {
  const auto sq = make_function("square");
  const auto p2 = make_function("pow_p", 2.0);
  for (double s : grid(0, 10, 41)) {
    for (double t : grid(0, 10, 41)) {
      EXPECT_LE(std::abs(superquadratic_gap(sq, s, t)), 1e-12);
      EXPECT_LE(std::abs(superquadratic_gap(p2, s, t)), 1e-12);
    }
  }
}

TEST(SuperquadraticGap, Examples) {
  const auto q = make_function("neg_pow_q", 1.5);
  EXPECT_NEAR(superquadratic_gap(q, 4, 1), -8 + 1 + 1.5 * 3 + std::pow(3.0, 1.5), 1e-12);
  EXPECT_GE(superquadratic_gap(q, 4, 1), 0.0);
  EXPECT_EQ(superquadratic_gap(make_function("pow_p", 3.0), 5, 5), 0.0);
  EXPECT_THROW(superquadratic_gap(q, -1, 1), DomainError);
}

TEST(SuperquadraticGap, NonNegativeOnGridForRegistry) {
  for (const auto& f : registry()) {
    for (double s : grid(0, 12, 61)) {
      for (double t : grid(0, 12, 61)) {
        const double scale = std::max({1.0, std::abs(f.value(s)), std::abs(f.value(t))});
        EXPECT_GE(superquadratic_gap(f, s, t), -1e-10 * scale) << f.specifier() << " s=" << s << " t=" << t;
      }
    }
  }
}

TEST(JensenGapScalar, Examples) {
  EXPECT_LE(std::abs(jensen_gap_scalar(make_function("square"), 4, 2, 0.3)), 1e-12);
  const auto q = make_function("neg_pow_q", 1.5);
  // Direct arithmetic: rhs = (f(4) + f(2))/2 - f(1)/2 - f(1)/2, lhs = f(3).
  const double expected = (-8.0 - std::pow(2.0, 1.5)) / 2.0 + 1.0 + std::pow(3.0, 1.5);
  EXPECT_NEAR(jensen_gap_scalar(q, 4, 2, 0.5), expected, 1e-12);
  EXPECT_GE(jensen_gap_scalar(q, 4, 2, 0.5), 0.0);
  // At the endpoints only the f(0) correction survives.
  for (const auto& f : registry()) {
    EXPECT_NEAR(jensen_gap_scalar(f, 3, 7, 0.0), -f.value(0.0), 1e-12);
    EXPECT_NEAR(jensen_gap_scalar(f, 3, 7, 1.0), -f.value(0.0), 1e-12);
  }
  EXPECT_THROW(jensen_gap_scalar(q, 1, 2, 1.5), ParameterError);
}

TEST(JensenGapScalar, EqualityForSquareAndNonNegativeForRegistry) {
  for (double t : grid(0, 8, 17)) {
    for (double s : grid(0, 8, 17)) {
      for (double a : grid(0, 1, 11)) {
        EXPECT_LE(std::abs(jensen_gap_scalar(make_function("square"), t, s, a)), 1e-12);
        for (const auto& f : registry()) {
          const double scale = std::max({1.0, std::abs(f.value(s)), std::abs(f.value(t))});
          EXPECT_GE(jensen_gap_scalar(f, t, s, a), -1e-10 * scale) << f.specifier();
        }
      }
    }
  }
}

TEST(SuperquadraticWitness, ContainsDerivativeForRegistry) {
  const auto samples = grid(0, 10, 101);
  for (const auto& f : registry()) {
    for (double t : {0.5, 1.0, 3.0, 7.25}) {
      const auto w = superquadratic_witness(f, t, samples);
      ASSERT_TRUE(w.has_value()) << f.specifier();
      EXPECT_LE(w->lo, f.derivative(t) + 1e-9);
      EXPECT_GE(w->hi, f.derivative(t) - 1e-9);
    }
  }
}

TEST(SuperquadraticWitness, EmptyForNonSuperquadraticShape) {
  // t^1.5 (positive, convex) is not superquadratic: the penalty f(|s-t|) is too
  // large, so no witness survives on a wide sample set at t = 1.
  const ScalarFunctionModel not_sq(Family::pow_p, 1.5);
  EXPECT_FALSE(superquadratic_witness(not_sq, 1.0, grid(0, 10, 101), 1.0, 0.0).has_value());
}

TEST(ApplyScalarFunction, ClampsNearDomainEdge) {
  const auto f = make_function("neg_pow_q", 1.5);
  const SymmetricMatrix m = SymmetricMatrix::diagonal({4.0, -1e-13});
  const SymmetricMatrix r = apply_scalar_function(f, m);
  EXPECT_DOUBLE_EQ(r(0, 0), -8.0);
  EXPECT_EQ(r(1, 1), 0.0);
  EXPECT_THROW(apply_scalar_function(f, SymmetricMatrix::diagonal({1.0, -0.1})), DomainError);
  EXPECT_NO_THROW(apply_scalar_function(make_function("square"), SymmetricMatrix::diagonal({1.0, -5.0})));
}
