#include <gtest/gtest.h>

#include "moodid/errors.hpp"
#include "moodid/metrics.hpp"
#include "moodid/rng.hpp"
#include "oracles/metrics_oracle.hpp"

using namespace moodid;

TEST(Metrics, HandComputedExample) {
  EXPECT_DOUBLE_EQ(precision(3, 1), 0.75);
  EXPECT_DOUBLE_EQ(recall(3, 2), 0.6);
  EXPECT_NEAR(f_score(3, 1, 2), 2.0 / 3.0, 1e-12);
}

TEST(Metrics, DegenerateZeros) {
  EXPECT_EQ(f_score(0, 0, 0), 0.0);
  EXPECT_EQ(precision(0, 0), 0.0);
  EXPECT_EQ(recall(0, 0), 0.0);
  EXPECT_EQ(f_score(0, 5, 5), 0.0);
}

TEST(Metrics, PerfectPrediction) {
  EXPECT_EQ(precision(9, 0), 1.0);
  EXPECT_EQ(recall(9, 0), 1.0);
  EXPECT_EQ(f_score(9, 0, 0), 1.0);
}

TEST(Metrics, RandomCountsMatchOracle) {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const std::size_t tp = rng.bernoulli(0.2) ? 0 : rng.below(1000);
    const std::size_t fp = rng.bernoulli(0.2) ? 0 : rng.below(1000);
    const std::size_t fn = rng.bernoulli(0.2) ? 0 : rng.below(1000);
    ASSERT_NEAR(precision(tp, fp), oracle::precision(tp, fp), 1e-12);
    ASSERT_NEAR(recall(tp, fn), oracle::recall(tp, fn), 1e-12);
    ASSERT_NEAR(f_score(tp, fp, fn), oracle::f_score(tp, fp, fn), 1e-12);
  }
}

TEST(Evaluate, MacroMicroWeighted) {
  // truth 1 1 1 2 2 3, predicted 1 1 2 2 3 3
  const std::vector<SubjectId> truth{{1}, {1}, {1}, {2}, {2}, {3}};
  const std::vector<SubjectId> pred{{1}, {1}, {2}, {2}, {3}, {3}};
  const auto r = evaluate(truth, pred);
  ASSERT_EQ(r.per_class.size(), 3u);
  EXPECT_EQ(r.per_class[0].tp, 2u);
  EXPECT_EQ(r.per_class[0].fn, 1u);
  EXPECT_EQ(r.per_class[1].fp, 1u);
  const double f1 = oracle::f_score(2, 0, 1), f2 = oracle::f_score(1, 1, 1), f3 = oracle::f_score(1, 1, 0);
  EXPECT_NEAR(r.macro_f, (f1 + f2 + f3) / 3, 1e-12);
  EXPECT_NEAR(r.weighted_f, (3 * f1 + 2 * f2 + f3) / 6, 1e-12);
  EXPECT_NEAR(r.micro_f, 4.0 / 6.0, 1e-12);
  EXPECT_NEAR(r.accuracy, 4.0 / 6.0, 1e-12);
}

TEST(Evaluate, PredictedOnlySubjectsDoNotEnterMacro) {
  const std::vector<SubjectId> truth{{1}, {2}};
  const std::vector<SubjectId> pred{{1}, {5}};
  const auto r = evaluate(truth, pred);
  EXPECT_EQ(r.per_class.size(), 3u);
  EXPECT_NEAR(r.macro_f, (1.0 + 0.0) / 2, 1e-12);
}

TEST(Evaluate, PerfectIsOne) {
  const std::vector<SubjectId> y{{4}, {2}, {4}, {9}};
  const auto r = evaluate(y, y);
  EXPECT_EQ(r.macro_f, 1.0);
  EXPECT_EQ(r.micro_f, 1.0);
  EXPECT_EQ(r.macro_precision, 1.0);
  EXPECT_EQ(r.macro_recall, 1.0);
}

TEST(Evaluate, LengthMismatchThrows) {
  const std::vector<SubjectId> a{{1}}, b{{1}, {2}};
  EXPECT_THROW(evaluate(a, b), std::invalid_argument);
}

TEST(Pearson, Identities) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> neg;
  for (double v : x) neg.push_back(-v);
  EXPECT_NEAR(*pearson(x, x), 1.0, 1e-15);
  EXPECT_NEAR(*pearson(x, neg), -1.0, 1e-15);
}

TEST(Pearson, UndefinedCases) {
  EXPECT_FALSE(pearson(std::vector<double>{1}, std::vector<double>{2}).has_value());
  EXPECT_FALSE(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}).has_value());
  EXPECT_FALSE(pearson(std::vector<double>{}, std::vector<double>{}).has_value());
}

TEST(Pearson, RandomPairsMatchOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
      x.push_back(rng.normal(3, 2));
      y.push_back(0.5 * x.back() + rng.normal(0, 1));
    }
    const auto got = pearson(x, y);
    const auto want = oracle::pearson(x, y);
    ASSERT_TRUE(got && want);
    ASSERT_NEAR(*got, *want, 1e-9);
  }
}
