#include <gtest/gtest.h>

#include <set>
#include <stdexcept>

#include "moodid/errors.hpp"
#include "moodid/hash.hpp"
#include "moodid/parallel.hpp"
#include "moodid/rng.hpp"
#include "moodid/types.hpp"

using namespace moodid;

namespace {

const StudyWindow kWindow{1364169600, 1364169600 + 60 * kSecondsPerDay};
const SubjectId kS{3};

bool has_problem(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(ValidateEvent, AudioClassOutOfRange) {
  const auto problems = validate_event(AudioInf{kS, kWindow.start, 5}, kWindow);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_TRUE(has_problem(problems, "class out of range"));
}

TEST(ValidateEvent, ActivityClassOutOfRange) {
  EXPECT_TRUE(has_problem(validate_event(ActivityInf{kS, kWindow.start, -1}, kWindow), "class out of range"));
  EXPECT_TRUE(validate_event(ActivityInf{kS, kWindow.start, 3}, kWindow).empty());
}

TEST(ValidateEvent, AnomalousCallDurationIsLegal) {
  EXPECT_TRUE(validate_event(Call{kS, kWindow.start + 10, 2386.0}, kWindow).empty());
}

TEST(ValidateEvent, NegativeCallDurationIsRejected) {
  EXPECT_FALSE(validate_event(Call{kS, kWindow.start, -1.0}, kWindow).empty());
}

TEST(ValidateEvent, GpsInRangeIsValid) {
  EXPECT_TRUE(validate_event(GpsFix{kS, kWindow.start + 100, 43.7, -72.3}, kWindow).empty());
}

TEST(ValidateEvent, GpsOutOfRange) {
  const auto problems = validate_event(GpsFix{kS, kWindow.start, 91.0, -181.0}, kWindow);
  EXPECT_EQ(problems.size(), 2u);
}

TEST(ValidateEvent, OutsideWindow) {
  EXPECT_TRUE(has_problem(validate_event(LockEvent{kS, kWindow.end}, kWindow), "outside study window"));
  EXPECT_TRUE(has_problem(validate_event(LockEvent{kS, kWindow.start - 1}, kWindow), "outside study window"));
  EXPECT_TRUE(validate_event(LockEvent{kS, kWindow.end - 1}, kWindow).empty());
}

TEST(ValidateEvent, EmaScales) {
  EXPECT_TRUE(validate_event(EmaResponse{kS, kWindow.start, EmaTopic::Stress, 5}, kWindow).empty());
  EXPECT_FALSE(validate_event(EmaResponse{kS, kWindow.start, EmaTopic::Stress, 6}, kWindow).empty());
  EXPECT_FALSE(validate_event(EmaResponse{kS, kWindow.start, EmaTopic::CurrentMood, 4}, kWindow).empty());
  EXPECT_FALSE(validate_event(EmaResponse{kS, kWindow.start, EmaTopic::SleepQuality, 0}, kWindow).empty());
  EXPECT_TRUE(validate_event(EmaResponse{kS, kWindow.start, EmaTopic::Sadness, 2.5}, kWindow).empty());
}

TEST(ValidateEvent, TaskIdSeparators) {
  EXPECT_FALSE(validate_event(AppTask{kS, kWindow.start, ""}, kWindow).empty());
  EXPECT_FALSE(validate_event(AppTask{kS, kWindow.start, "a b"}, kWindow).empty());
  EXPECT_FALSE(validate_event(AppTask{kS, kWindow.start, "a,b"}, kWindow).empty());
  EXPECT_TRUE(validate_event(AppTask{kS, kWindow.start, "com.android.launcher"}, kWindow).empty());
}

TEST(StudyWindow, GridArithmetic) {
  EXPECT_EQ(kWindow.grid_length(), 1440);
  EXPECT_EQ(kWindow.hour_of(kWindow.start + 13 * 3600 + 59 * 60), 13);
  const StudyWindow partial{0, 3601};
  EXPECT_EQ(partial.grid_length(), 2);
  EXPECT_EQ(StudyWindow{}.grid_length(), 0);
}

TEST(Keywords, RoundTrip) {
  for (EmaTopic t : kEmaTopics) EXPECT_EQ(parse_topic(topic_keyword(t)), t);
  for (EventKind k : kEventKinds) EXPECT_EQ(parse_kind(kind_keyword(k)), k);
  for (Mood m : kMoods) EXPECT_EQ(parse_mood(mood_keyword(m)), m);
  for (auto v : {DatasetVariant::Raw, DatasetVariant::H, DatasetVariant::D}) {
    EXPECT_EQ(parse_variant(variant_keyword(v)), v);
  }
  EXPECT_FALSE(parse_topic("joy").has_value());
  EXPECT_FALSE(parse_kind("sms").has_value());
}

TEST(Hash, KnownFnvVectors) {
  EXPECT_EQ(hash_hex(""), "cbf29ce484222325");
  EXPECT_EQ(hash_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(hash_hex("foobar"), "85944171f73967e8");
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng r(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(r.below(0), 0u);
  EXPECT_EQ(r.below(1), 0u);
}

TEST(Rng, UniformMomentsAndPoissonMean) {
  Rng r(9);
  double sum = 0, psum = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    psum += r.poisson(3.0);
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
  EXPECT_NEAR(psum / n, 3.0, 0.05);
}

TEST(Rng, CategoricalSkipsZeroWeights) {
  Rng r(5);
  const std::vector<double> w{0.0, 1.0, 0.0, 3.0};
  int counts[4]{};
  for (int i = 0; i < 4000; ++i) ++counts[r.categorical(w)];
  EXPECT_EQ(counts[0], 0);
  EXPECT_EQ(counts[2], 0);
  EXPECT_NEAR(counts[3] / 4000.0, 0.75, 0.03);
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(7, i));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_NE(derive_seed(7, 0), derive_seed(8, 0));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned jobs : {1u, 2u, 8u}) {
    std::vector<int> hits(500, 0);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) ASSERT_EQ(h, 1);
  }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}
