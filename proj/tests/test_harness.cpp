#include <gtest/gtest.h>

#include <cmath>

#include "superquad/harness.hpp"

using namespace superquad;

namespace {

const SymmetricMatrix kA{{5, -1}, {-1, 5}};
const SymmetricMatrix kB = SymmetricMatrix::diagonal({2, 4});

SuiteConfig small_config(std::vector<std::string> suites, int trials = 40) {
  SuiteConfig c;
  c.trials = trials;
  c.suites = std::move(suites);
  return c;
}

}  // namespace

TEST(VectorJensen, BasisVectorOnDiagonalMatrix) {
  const Vector e1 = Vector::Unit(3, 0);
  const auto a = SymmetricMatrix::diagonal({3, 1, 2});
  EXPECT_NEAR(check_vector_jensen(make_function("neg_pow_q", 1.5), a, e1, JensenMode::k), 0.0, 1e-14);
  // f(0) = -1 for the root-sum family, so the margin is 1.
  EXPECT_NEAR(check_vector_jensen(make_function("neg_root_sum", 1.0), a, e1, JensenMode::k), 1.0, 1e-14);
}

TEST(VectorJensen, SquareModeMpIsVariance) {
  const Vector x = Vector::Constant(2, std::sqrt(0.5));
  const double mean = x.dot(kA.matrix() * x);
  const double second = x.dot(kA.matrix() * kA.matrix() * x);
  EXPECT_NEAR(check_vector_jensen(make_function("square"), kA, x, JensenMode::mp), second - mean * mean, 1e-12);
  // Superquadratic refinement with f = t^2 is an equality.
  EXPECT_NEAR(check_vector_jensen(make_function("pow_p", 2.0), kA, x, JensenMode::k), 0.0, 1e-12);
}

TEST(VectorJensen, IdentityMapMatchesModeK) {
  Rng rng(9);
  const PositiveMapCD id{Matrix::Identity(3, 3), Matrix::Zero(3, 3)};
  for (int i = 0; i < 20; ++i) {
    const auto a = random_with_spectrum(3, 0.0, 8.0, rng);
    const Vector x = random_unit_vector(3, rng);
    const auto f = make_function("pow_p", 2.5);
    EXPECT_NEAR(check_vector_jensen(f, a, x, JensenMode::kd, &id), check_vector_jensen(f, a, x, JensenMode::k), 1e-10);
  }
}

TEST(VectorJensen, Validation) {
  const auto f = make_function("pow_p", 2.0);
  EXPECT_THROW(check_vector_jensen(f, kA, Vector::Constant(2, 1.0), JensenMode::k), ParameterError);
  EXPECT_THROW(check_vector_jensen(f, kA, Vector::Unit(3, 0), JensenMode::k), DimensionError);
  EXPECT_THROW(check_vector_jensen(f, kA, Vector::Unit(2, 0), JensenMode::kd), MapError);
  EXPECT_THROW(check_vector_jensen(make_function("x2_log"), kA, Vector::Unit(2, 0), JensenMode::mp),
               ClassificationError);
}

TEST(PowerMean, Examples) {
  EXPECT_TRUE(check_power_mean(kA, kB, 1.5).pass);
  EXPECT_NEAR(check_power_mean(kA, kB, 1.0).margin, 0.0, 1e-12);
  EXPECT_TRUE(check_power_mean(kA, kB, 3.0).pass);
  EXPECT_THROW(check_power_mean(kA, kB, 0.5), ParameterError);
}

TEST(ClassifySpectra, Cases) {
  EXPECT_EQ(classify_spectra(Vector{{2, 1}}, Vector{{2, 1}}), Tighter::tie);
  EXPECT_EQ(classify_spectra(Vector{{1, 1}}, Vector{{2, 2}}), Tighter::thm21);
  EXPECT_EQ(classify_spectra(Vector{{3, 2}}, Vector{{2, 2}}), Tighter::thm25);
  EXPECT_EQ(classify_spectra(Vector{{3, 1}}, Vector{{2, 2}}), Tighter::incomparable);
}

TEST(CompareEstimates, ExamplePairs) {
  const auto f = make_function("neg_pow_q", 4.0 / 3.0);
  EXPECT_EQ(compare_estimates(f, kA, SymmetricMatrix{{4, 1}, {1, 5}}, 0.5, "set2").tighter, Tighter::thm25);
  EXPECT_EQ(compare_estimates(f, SymmetricMatrix{{9, -1}, {-1, 8}}, SymmetricMatrix{{5, 1}, {1, 5}}, 0.5, "set3").tighter,
            Tighter::thm21);
}

TEST(SuiteConfig, Validation) {
  SuiteConfig c;
  EXPECT_NO_THROW(c.validate());
  c.trials = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.dims = {};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.dims = {0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.functions = {"pow_p:1"};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.suites = {"thm99"};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.trials = 0;
  EXPECT_THROW(run_suite(c), ConfigError);
}

TEST(SuiteConfig, JsonRoundTripAndUnknownKeys) {
  SuiteConfig c;
  c.master_seed = 7;
  c.dims = {1, 3};
  c.functions = {"neg_pow_q:2"};
  const SuiteConfig back = suite_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_THROW(suite_config_from_json(Json{{"trails", 5}}), ConfigError);
  EXPECT_THROW(suite_config_from_json(Json{{"trials", "many"}}), ConfigError);
  EXPECT_THROW(suite_config_from_json(Json::array()), ConfigError);
  EXPECT_EQ(suite_config_from_json(Json{{"trials", 3}}).trials, 3);
}

TEST(Seeds, StreamsAreIndependent) {
  EXPECT_NE(derive_seed(42, "thm21", 0), derive_seed(42, "thm25", 0));
  EXPECT_NE(derive_seed(42, "thm21", 0), derive_seed(42, "thm21", 1));
  EXPECT_NE(derive_seed(42, "thm21", 0), derive_seed(43, "thm21", 0));
  EXPECT_EQ(derive_seed(42, "thm21", 5), derive_seed(42, "thm21", 5));
}

TEST(RunSuite, AssertedSuitesPassOnSmallRun) {
  const SuiteReport r = run_suite(small_config({}, 30));
  EXPECT_EQ(r.records.size(), suite_names().size());
  for (const auto& rec : r.records) {
    EXPECT_TRUE(rec.ok()) << rec.name << ": " << rec.failures() << " failures, worst " << rec.worst_margin;
    EXPECT_EQ(rec.skipped, 0) << rec.name;
    EXPECT_GT(rec.trials_run, 0) << rec.name;
  }
  EXPECT_TRUE(r.passed());
}

TEST(RunSuite, Deterministic) {
  const SuiteConfig c = small_config({"thm21", "thm29", "sandwich_upper_paper", "dilation"}, 25);
  const SuiteReport r1 = run_suite(c);
  const SuiteReport r2 = run_suite(c);
  ASSERT_EQ(r1.records.size(), r2.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i) {
    EXPECT_EQ(r1.records[i].pass_count, r2.records[i].pass_count);
    EXPECT_EQ(r1.records[i].worst_margin, r2.records[i].worst_margin);
    EXPECT_EQ(r1.records[i].worst_case_seed, r2.records[i].worst_case_seed);
    EXPECT_EQ(r1.records[i].counterexamples.size(), r2.records[i].counterexamples.size());
  }
}

TEST(RunSuite, PaperSandwichCounterexampleInDimensionOne) {
  SuiteConfig c = small_config({"sandwich_upper_paper", "sandwich_upper_derived"}, 20);
  c.dims = {1};
  c.functions = {"neg_pow_q:2"};
  const SuiteReport r = run_suite(c);
  const SuiteRecord& paper = r.record("sandwich_upper_paper");
  ASSERT_FALSE(paper.counterexamples.empty());
  EXPECT_FALSE(paper.asserted);
  EXPECT_TRUE(paper.ok());
  const Counterexample& first = paper.counterexamples.front();
  EXPECT_EQ(first.trial, 0);
  EXPECT_EQ(first.instance.at("x"), Json::array({Json::array({1.0})}));
  EXPECT_EQ(r.record("sandwich_upper_derived").failures(), 0);
  EXPECT_TRUE(r.passed());
}

TEST(RunSuite, CounterexamplesReplayExactly) {
  SuiteConfig c = small_config({"sandwich_upper_paper", "cor211_paper"}, 60);
  const SuiteReport r = run_suite(c);
  int replayed = 0;
  for (const auto& rec : r.records) {
    EXPECT_LE(rec.counterexamples.size(), SuiteRecord::kMaxCounterexamples);
    for (const auto& cx : rec.counterexamples) {
      // Through a JSON text round trip, as a user would replay it from a report.
      const Json instance = Json::parse(cx.instance.dump());
      EXPECT_NEAR(replay(instance, c).margin, cx.margin, 1e-12);
      ++replayed;
    }
  }
  EXPECT_GT(replayed, 0);
}

TEST(RunSuite, SuiteWithoutApplicableFunctionIsNoted) {
  SuiteConfig c = small_config({"thm21", "thm29"}, 5);
  c.functions = {"x2_log"};
  const SuiteReport r = run_suite(c);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.trials_run, 0);
    EXPECT_TRUE(rec.note.has_value());
    EXPECT_TRUE(rec.ok());
  }
}

TEST(RunSuite, PreliminarySuitesRunTwiceTheTrials) {
  const SuiteReport r = run_suite(small_config({"eq_k", "congruence"}, 15));
  EXPECT_EQ(r.record("eq_k").trials_run, 30);
  EXPECT_EQ(r.record("congruence").trials_run, 15);
}
