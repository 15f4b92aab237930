#include <gtest/gtest.h>

#include <cmath>

#include "superquad/bounds.hpp"
#include "superquad/random.hpp"

using namespace superquad;

namespace {

SymmetricMatrix scalar1(double v) { return SymmetricMatrix::scalar(1, v); }

const SymmetricMatrix kA{{5, -1}, {-1, 5}};
const SymmetricMatrix kB = SymmetricMatrix::diagonal({2, 4});

double ing(const BoundReport& r, const std::string& key) { return std::get<double>(r.ingredients.at(key)); }

}  // namespace

// Concave bound S

TEST(ConcaveBoundS, ScalarEquality) {
  const auto r = concave_bound_S(make_function("neg_pow_q", 2.0), scalar1(4), scalar1(2), 0.5);
  EXPECT_NEAR(r.lhs(0, 0), -9.0, 1e-14);
  EXPECT_NEAR(r.bound(0, 0), -9.0, 1e-14);
  EXPECT_TRUE(r.verdict.pass);
}

TEST(ConcaveBoundS, EqualArgumentsGiveRangeSlack) {
  const auto f = make_function("neg_pow_q", 1.5);
  const auto r = concave_bound_S(f, kA, kA, 0.3);
  // S = f(A) - f(l1 - ln) I, so the margin is -f(2) = 2^{3/2}.
  EXPECT_NEAR(r.verdict.margin, std::pow(2.0, 1.5), 1e-12);
}

TEST(ConcaveBoundS, FirstExamplePair) {
  const auto f = make_function("neg_pow_q", 1.5);
  const auto r = concave_bound_S(f, kA, kB, 0.5);
  EXPECT_TRUE(r.verdict.pass);
  const Vector neg = std::get<Vector>(r.ingredients.at("negated_bound_spectrum"));
  EXPECT_NEAR(neg(0), 6.59208029, 1e-7);
  EXPECT_NEAR(neg(1), 2.12479309, 1e-7);
}

TEST(ConcaveBoundS, InputValidation) {
  const auto f = make_function("neg_pow_q", 1.5);
  EXPECT_THROW(concave_bound_S(make_function("pow_p", 2.0), kA, kB, 0.5), ClassificationError);
  EXPECT_THROW(concave_bound_S(f, kA, kB, 1.5), ParameterError);
  EXPECT_THROW(concave_bound_S(f, kA, SymmetricMatrix::diagonal({1, -1}), 0.5), DomainError);
  EXPECT_THROW(concave_bound_S(f, kA, scalar1(1), 0.5), DimensionError);
}

TEST(ConcaveBoundS, RandomInstancesHold) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 6);
    const auto f = make_function("neg_pow_q", 1.0 + (seed % 5) * 0.25);
    const double alpha = 0.1 * (1 + seed % 9);
    const auto r = concave_bound_S(f, random_psd(n, seed, 10.0), random_psd(n, seed + 1000, 10.0), alpha);
    EXPECT_GE(r.normalized_margin(), -1e-8) << "seed " << seed;
    EXPECT_EQ(recompute_verdict(r).pass, r.verdict.pass);
  }
}

// Map bound

TEST(PhiBound, IdentityMap) {
  const auto f = make_function("neg_pow_q", 1.5);
  const PositiveMapCD id{Matrix::Identity(2, 2), Matrix::Zero(2, 2)};
  const auto r = phi_bound(f, id, kA);
  EXPECT_LE((r.lhs - apply_scalar_function(f, kA)).norm_fro(), 1e-12);
  EXPECT_NEAR(r.verdict.margin, std::pow(2.0, 1.5), 1e-12);
}

TEST(PhiBound, TwoBlockMapFixesA) {
  const auto f = make_function("neg_pow_q", 1.5);
  const double h = std::sqrt(0.5);
  const PositiveMapCD phi{h * Matrix::Identity(2, 2), h * Matrix::Identity(2, 2)};
  EXPECT_LE((phi(kA) - kA).norm_fro(), 1e-12);
  const auto r = phi_bound(f, phi, kA);
  const Vector expected = (eigenvalues(apply_scalar_function(f, kA)).array() - f.value(2.0)).matrix();
  EXPECT_LE((r.bound_spectrum() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PhiBound, NonUnitalMapRejected) {
  const PositiveMapCD phi{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  EXPECT_THROW(phi_bound(make_function("neg_pow_q", 1.5), phi, kA), MapError);
}

TEST(PhiBound, RandomMapsHold) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 5);
    const PositiveMapCD phi = random_unital_map(n, seed);
    const Index input = seed % 2 ? 2 * n : n;
    const auto r = phi_bound(make_function("neg_root_sum", 0.5), phi, random_psd(input, seed + 7, 10.0));
    EXPECT_GE(r.normalized_margin(), -1e-8) << "seed " << seed;
    EXPECT_LE(ing(r, "unitality_residual"), 1e-10);
  }
}

TEST(CombinePairBound, UnitalWeightsAndExample) {
  const auto f = make_function("neg_pow_q", 4.0 / 3.0);
  const auto r = combine_pair_bound(f, SymmetricMatrix{{5, -1}, {-1, 5}}, SymmetricMatrix{{4, 1}, {1, 5}}, 0.5);
  EXPECT_LE(ing(r, "unitality_residual"), 1e-14);
  const Vector neg = std::get<Vector>(r.ingredients.at("negated_bound_spectrum"));
  EXPECT_NEAR(neg(0), 5.0212, 1e-4);
  EXPECT_NEAR(neg(1), 3.9202, 1e-4);
  EXPECT_TRUE(r.verdict.pass);
}

// Loewner reverse power mean

TEST(CorPowerMeanReverse, ScalarCases) {
  // a = 4, b = 1: (16 + 1)/2 = 8.5 = 2.5^2 + 1.5^2.
  auto r = cor_power_mean_reverse(scalar1(4), scalar1(1), 2.0);
  EXPECT_NEAR(r.lhs(0, 0), 8.5, 1e-13);
  EXPECT_NEAR(r.bound(0, 0), 8.5, 1e-13);
  EXPECT_NEAR(r.verdict.margin, 0.0, 1e-13);
  // a = 4, b = 2: 10 = 9 + 1.
  r = cor_power_mean_reverse(scalar1(4), scalar1(2), 2.0);
  EXPECT_NEAR(r.lhs(0, 0), 10.0, 1e-13);
  EXPECT_NEAR(r.bound(0, 0), 10.0, 1e-13);
}

TEST(CorPowerMeanReverse, FirstExamplePair) {
  const auto r = cor_power_mean_reverse(kA, kB, 1.5);
  EXPECT_TRUE(r.verdict.pass);
  EXPECT_EQ(r.mode, ComparisonMode::loewner);
  const Matrix w = std::get<Matrix>(r.ingredients.at("conjugating_orthogonal"));
  EXPECT_LE(OrthogonalMatrix::orthogonality_residual(w), 1e-12);
  const Vector est = eigenvalues(SymmetricMatrix(std::get<Matrix>(r.ingredients.at("rearranged_lower_estimate"))));
  EXPECT_NEAR(est(0), 6.59208029, 1e-7);
  EXPECT_NEAR(est(1), 2.12479309, 1e-7);
}

TEST(CorPowerMeanReverse, EqualityOnlyForScalarMatrices) {
  const auto eq = cor_power_mean_reverse(SymmetricMatrix::scalar(3, 2.0), SymmetricMatrix::scalar(3, 2.0), 1.5);
  EXPECT_NEAR(eq.verdict.margin, 0.0, 1e-12);
  const auto strict = cor_power_mean_reverse(kA, kA, 1.5);
  EXPECT_GT(strict.verdict.margin, 0.5);
}

TEST(CorPowerMeanReverse, RandomLoewnerHolds) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 5);
    const auto r = cor_power_mean_reverse(random_psd(n, seed, 10.0), random_psd(n, seed + 99, 10.0),
                                          1.0 + (seed % 5) * 0.25);
    EXPECT_GE(r.normalized_margin(), -1e-8) << "seed " << seed;
  }
}

TEST(CorSumLower, ScalarEqualityAndRandom) {
  const auto r = cor_sum_lower(scalar1(4), scalar1(2), 2.0);
  EXPECT_NEAR(r.lhs(0, 0), 36.0, 1e-12);
  EXPECT_NEAR(r.bound(0, 0), 36.0, 1e-12);
  EXPECT_EQ(r.side, BoundSide::lower);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 5);
    const auto s = cor_sum_lower(random_psd(n, seed, 10.0), random_psd(n, seed + 5, 10.0), 1.0 + (seed % 5) * 0.25);
    EXPECT_GE(s.normalized_margin(), -1e-8) << "seed " << seed;
  }
  EXPECT_THROW(cor_sum_lower(kA, kB, 2.5), ParameterError);
}

// Convex bound T

TEST(ConvexBoundT, ScalarCases) {
  auto r = convex_bound_T(make_function("pow_p", 2.0), scalar1(4), scalar1(2), 0.5);
  EXPECT_NEAR(r.lhs(0, 0), 9.0, 1e-13);
  EXPECT_NEAR(r.bound(0, 0), 9.0, 1e-13);
  EXPECT_EQ(std::get<std::string>(r.ingredients.at("gamma_alpha_regime")), "degenerate");
  r = convex_bound_T(make_function("pow_p", 3.0), scalar1(4), scalar1(2), 0.5);
  EXPECT_NEAR(r.lhs(0, 0), 27.0, 1e-12);
  EXPECT_NEAR(r.bound(0, 0), 35.0, 1e-12);
}

TEST(ConvexBoundT, SmallScalarShiftIsDegenerate) {
  Rng rng(4);
  const SymmetricMatrix b = random_with_spectrum(3, 1.0, 5.0, rng);
  const auto r = convex_bound_T(make_function("pow_p", 2.0), b.shifted(1e-3), b, 0.4);
  EXPECT_TRUE(r.verdict.pass);
  EXPECT_EQ(ing(r, "gamma_alpha"), 1.0);
  // f = t^2 is the equality case: T - lhs vanishes for commuting scalar shifts.
  EXPECT_NEAR(r.verdict.margin, 0.0, 1e-10);
}

TEST(ConvexBoundT, SingularDifferenceRejected) {
  EXPECT_THROW(convex_bound_T(make_function("pow_p", 2.0), SymmetricMatrix::diagonal({2, 1}),
                              SymmetricMatrix::diagonal({1, 1}), 0.5),
               SingularityError);
  EXPECT_THROW(convex_bound_T(make_function("neg_pow_q", 1.5), kA, kB.shifted(5), 0.5), ClassificationError);
  EXPECT_THROW(convex_bound_T(make_function("x2_log"), kA, kB.shifted(5), 0.5), ClassificationError);
  EXPECT_THROW(convex_bound_T(make_function("pow_p", 2.0), SymmetricMatrix::diagonal({1, 0}), kB, 0.5), DomainError);
}

TEST(ConvexBoundT, DefiniteDifferenceGivesFiniteConstants) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 5);
    const auto [a, b] = random_pd_pair_definite_diff(n, seed, 10.0, 0.1);
    const auto r = convex_bound_T(make_function("pow_p", 2.0 + (seed % 3) * 0.5), a, b, 0.1 * (1 + seed % 9));
    EXPECT_GE(r.normalized_margin(), -1e-8) << "seed " << seed;
    EXPECT_GE(ing(r, "gamma_alpha"), 1.0 - 1e-12);
    EXPECT_GE(ing(r, "gamma_one_minus_alpha"), 1.0 - 1e-12);
    EXPECT_TRUE(std::isfinite(ing(r, "gamma_alpha")));
  }
}

TEST(ConvexBoundT, StraddlingDifferenceUsesZeroInverse) {
  const auto r = convex_bound_T(make_function("pow_p", 2.0), SymmetricMatrix::diagonal({4, 2}),
                                SymmetricMatrix::diagonal({1, 3}), 0.5);
  EXPECT_EQ(ing(r, "gamma_alpha_inverse"), 0.0);
  EXPECT_TRUE(std::isinf(ing(r, "gamma_alpha")));
  EXPECT_FALSE(r.notes.empty());
  EXPECT_TRUE(r.verdict.pass);
}

TEST(CorMidpointConvex, ScalarShiftEquality) {
  const auto b = SymmetricMatrix::identity(2);
  const auto r = cor_midpoint_convex(b.shifted(2.0), b, make_function("pow_p", 2.0));
  EXPECT_NEAR(r.verdict.margin, 0.0, 1e-12);
  EXPECT_TRUE(r.verdict.pass);
}

TEST(CorMidpointConvex, DiagonalStraddlingExample) {
  const auto r = cor_midpoint_convex(SymmetricMatrix::diagonal({4, 2}), SymmetricMatrix::diagonal({1, 3}),
                                     make_function("pow_p", 2.0));
  EXPECT_TRUE(r.verdict.pass);
  EXPECT_EQ(r.mode, ComparisonMode::loewner);
  EXPECT_NEAR(r.lhs(0, 0), 6.25, 1e-13);
  const Vector bs = r.bound_spectrum();
  EXPECT_NEAR(bs(0), 8.5, 1e-12);
  EXPECT_NEAR(bs(1), 6.5, 1e-12);
}

TEST(CorMidpointConvex, RandomLoewnerHolds) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Index n = 2 + static_cast<Index>(seed % 4);
    const auto [a, b] = seed % 2 ? random_pd_pair_definite_diff(n, seed, 10.0, 0.1)
                                 : random_pd_pair_invertible_diff(n, seed, 10.0, 0.1);
    const auto r = cor_midpoint_convex(a, b, make_function("pow_p", 2.5));
    EXPECT_GE(r.normalized_margin(), -1e-8) << "seed " << seed;
  }
}

// Power convex corollary

TEST(CorPowerConvex, ScalarCases) {
  auto r = cor_power_convex(scalar1(4), scalar1(2), 2.0);
  EXPECT_NEAR(r.lhs(0, 0), 36.0, 1e-12);
  EXPECT_NEAR(r.bound(0, 0), 36.0, 1e-12);
  r = cor_power_convex(scalar1(4), scalar1(2), 3.0);
  EXPECT_NEAR(r.lhs(0, 0), 216.0, 1e-11);
  EXPECT_NEAR(r.bound(0, 0), 280.0, 1e-11);
}

TEST(CorPowerConvex, StraddlingIntervalUsesStatedFormula) {
  const auto r = cor_power_convex(SymmetricMatrix::diagonal({4, 2}), SymmetricMatrix::diagonal({1, 3}), 2.0);
  EXPECT_NEAR(ing(r, "kantorovich_abs_power"), kantorovich_abs_power(-0.5, 1.5, 2.0), 1e-15);
  EXPECT_FALSE(r.notes.empty());
}

TEST(CorPowerConvex, VariantsAreReciprocal) {
  const auto a = SymmetricMatrix::diagonal({6, 7});
  const auto b = SymmetricMatrix::diagonal({1, 1});
  const auto paper = cor_power_convex(a, b, 3.0, KantorovichVariant::paper);
  const auto recip = cor_power_convex(a, b, 3.0, KantorovichVariant::reciprocal);
  EXPECT_NEAR(ing(paper, "coefficient") * ing(recip, "coefficient"), 1.0, 1e-14);
  EXPECT_GT(ing(paper, "coefficient"), 1.0);
  EXPECT_NEAR(ing(paper, "kantorovich_abs_power"), ing(paper, "kantorovich_gamma_path"), 1e-10);
  EXPECT_TRUE(recip.verdict.pass);
  EXPECT_EQ(recip.name, "cor211_reciprocal");
}

TEST(CorPowerConvex, ReciprocalHoldsOnDefinitePairs) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 5);
    const auto [a, b] = random_pd_pair_definite_diff(n, seed, 10.0, 0.1);
    const auto r = cor_power_convex(a, b, 2.0 + (seed % 3) * 0.5, KantorovichVariant::reciprocal);
    EXPECT_GE(r.normalized_margin(), -1e-8) << "seed " << seed;
  }
}

// Subadditivity sandwich

TEST(Sandwich, PaperCorrectionFailsOnScalarOne) {
  const auto one = scalar1(1);
  const auto paper = subadditivity_sandwich(one, one, 2.0, CorrectionVariant::paper);
  EXPECT_NEAR(paper.lhs(0, 0), 4.0, 1e-13);
  EXPECT_NEAR(paper.upper(0, 0), 2.0, 1e-13);
  EXPECT_FALSE(paper.upper_verdict.pass);
  EXPECT_NEAR(paper.upper_verdict.margin, -2.0, 1e-13);
  EXPECT_TRUE(paper.lower_verdict.pass);
  const auto derived = subadditivity_sandwich(one, one, 2.0, CorrectionVariant::derived);
  EXPECT_TRUE(derived.upper_verdict.pass);
  EXPECT_NEAR(derived.correction_value, 8.0, 1e-13);
}

TEST(Sandwich, ComplementaryProjections) {
  const auto r = subadditivity_sandwich(SymmetricMatrix::diagonal({1, 0}), SymmetricMatrix::diagonal({0, 1}), 1.5);
  EXPECT_TRUE(r.lower_verdict.pass);
  EXPECT_TRUE(r.upper_verdict.pass);
  EXPECT_LE((r.lhs - SymmetricMatrix::identity(2)).norm_fro(), 1e-12);
}

TEST(Sandwich, RandomDerivedBothSidesHold) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Index n = 1 + static_cast<Index>(seed % 6);
    const auto x = random_psd(n, seed, 10.0);
    const auto y = seed % 4 == 0 ? x : random_psd(n, seed + 31, 10.0);
    const auto r = subadditivity_sandwich(x, y, 1.0 + (seed % 5) * 0.25);
    EXPECT_GE(r.lower_verdict.margin / r.scale(), -1e-8) << "seed " << seed;
    EXPECT_GE(r.upper_verdict.margin / r.scale(), -1e-8) << "seed " << seed;
    EXPECT_LE(std::get<double>(r.ingredients.at("contraction_norm_x")), 1.0 + 1e-10);
    EXPECT_LE(std::get<double>(r.ingredients.at("compression_residual_y")), 1e-9 * r.scale());
  }
}

TEST(Sandwich, SingularSumRejected) {
  EXPECT_THROW(subadditivity_sandwich(SymmetricMatrix::diagonal({1, 0}), SymmetricMatrix::diagonal({1, 0}), 1.5),
               SingularityError);
  EXPECT_THROW(subadditivity_sandwich(kA, kB, 2.5), ParameterError);
}

// Dilation

TEST(DilationPair, ZeroContraction) {
  const auto x = SymmetricMatrix::diagonal({1, 4});
  const auto p = dilation_pair(x, Matrix::Zero(2, 2));
  const auto expected = direct_sum(SymmetricMatrix::zero(2), x);
  EXPECT_LE((p.a - expected).norm_fro(), 1e-14);
  EXPECT_LE((p.b - expected).norm_fro(), 1e-14);
}

TEST(DilationPair, HalfContractionBlocks) {
  const auto x = SymmetricMatrix::diagonal({1, 4});
  const Matrix c = std::sqrt(0.5) * Matrix::Identity(2, 2);
  const auto p = dilation_pair(x, c);
  EXPECT_LE(p.midpoint_residual, 1e-13);
  EXPECT_LE(p.modulus_residual, 1e-13);
  const auto half = 0.5 * x;
  EXPECT_LE((0.5 * (p.a + p.b) - direct_sum(half, half)).norm_fro(), 1e-13);
  EXPECT_LE((matrix_abs(0.5 * (p.a - p.b)) - direct_sum(half, half)).norm_fro(), 1e-13);
}

TEST(DilationPair, RandomIdentitiesAndOrthogonality) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const Index n = 1 + static_cast<Index>(seed % 5);
    const auto x = random_with_spectrum(n, 0.1, 10.0, rng);
    const auto p = dilation_pair(x, random_contraction(n, rng));
    EXPECT_LE(p.midpoint_residual, 1e-9 * std::max(1.0, x.norm_2()));
    EXPECT_LE(p.modulus_residual, 1e-9 * std::max(1.0, x.norm_2()));
    EXPECT_LE(OrthogonalMatrix::orthogonality_residual(p.r1.matrix()), 1e-12);
  }
}

TEST(DilationPair, RejectsNonContraction) {
  EXPECT_THROW(dilation_pair(SymmetricMatrix::identity(2), 2.0 * Matrix::Identity(2, 2)), ParameterError);
  EXPECT_THROW(dilation_pair(SymmetricMatrix::identity(2), Matrix::Identity(3, 3)), DimensionError);
}

TEST(DilationBlockBound, IdentityInput) {
  const auto r = dilation_block_bound(SymmetricMatrix::identity(2), std::sqrt(0.5) * Matrix::Identity(2, 2),
                                      make_function("pow_p", 2.0));
  EXPECT_TRUE(r.verdict.pass);
  EXPECT_LE(ing(r, "y_formula_residual"), 1e-12);
}

TEST(DilationBlockBound, RandomInstancesHold) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const Index n = 1 + static_cast<Index>(seed % 4);
    const auto x = random_with_spectrum(n, 0.1, 10.0, rng);
    const auto r = dilation_block_bound(x, random_contraction(n, rng), make_function("pow_p", 2.0 + (seed % 3) * 0.5));
    EXPECT_GE(r.normalized_margin(), -1e-8) << "seed " << seed;
    EXPECT_GE(ing(r, "block_inequality_margin") / r.scale(), -1e-8);
    EXPECT_LE(ing(r, "y_formula_residual"), 1e-8 * r.scale());
    EXPECT_LE(ing(r, "bound_off_diagonal_norm"), 1e-8 * r.scale());
  }
}
