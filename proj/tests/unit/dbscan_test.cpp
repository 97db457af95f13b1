#include <gtest/gtest.h>

#include "moodid/errors.hpp"
#include "moodid/dbscan.hpp"
#include "moodid/rng.hpp"
#include "oracles/dbscan_oracle.hpp"

using namespace moodid;

namespace {

std::vector<oracle::Pt> to_oracle(const std::vector<GeoPoint>& pts) {
  std::vector<oracle::Pt> out;
  for (const auto& p : pts) out.push_back({p.lat, p.lon});
  return out;
}

}  // namespace

TEST(Dbscan, IdenticalPointsFormOneCluster) {
  const std::vector<GeoPoint> pts(10, GeoPoint{43.7, -72.3});
  EXPECT_EQ(dbscan(pts, {0.5, 5}), std::vector<int>(10, 0));
}

TEST(Dbscan, SparsePointsAreNoise) {
  const std::vector<GeoPoint> pts{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_EQ(dbscan(pts, {0.5, 2}), std::vector<int>(3, kNoise));
}

TEST(Dbscan, EmptyInput) { EXPECT_TRUE(dbscan({}).empty()); }

TEST(Dbscan, DistanceEqualToEpsIsNeighbour) {
  const std::vector<GeoPoint> pts{{0, 0}, {0.5, 0}};
  EXPECT_EQ(dbscan(pts, {0.5, 2}), (std::vector<int>{0, 0}));
}

TEST(Dbscan, ClustersNumberedByFirstCorePoint) {
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({20.0 + 0.01 * i, 0});
  for (int i = 0; i < 5; ++i) pts.push_back({-20.0 + 0.01 * i, 0});
  const auto labels = dbscan(pts);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(labels[static_cast<std::size_t>(i)], 0);
  for (int i = 5; i < 10; ++i) EXPECT_EQ(labels[static_cast<std::size_t>(i)], 1);
}

TEST(Dbscan, TwoGaussianBlobsMatchOracle) {
  Rng rng(17);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 50; ++i) pts.push_back({rng.normal(0, 0.1), rng.normal(0, 0.1)});
  for (int i = 0; i < 50; ++i) pts.push_back({rng.normal(30, 0.1), rng.normal(30, 0.1)});
  const auto labels = dbscan(pts);
  const auto expected = oracle::dbscan(to_oracle(pts), 0.5, 5);
  EXPECT_EQ(labels, expected);
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  EXPECT_EQ(max_label, 1);
}

TEST(Dbscan, RandomInstancesMatchOracle) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(rng.below(201));
    const std::size_t centers = 1 + rng.below(5);
    const double spread = rng.uniform(0.05, 0.6);
    std::vector<GeoPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
      const double cx = static_cast<double>(rng.below(centers)) * 1.3;
      pts.push_back({cx + rng.normal(0, spread), rng.normal(0, spread)});
    }
    const DbscanParams params{rng.uniform(0.1, 0.8), 1 + rng.below(8)};
    const auto got = dbscan(pts, params);
    const auto want = oracle::dbscan(to_oracle(pts), params.eps, params.min_pts);
    ASSERT_TRUE(oracle::same_up_to_renumbering(got, want)) << "seed " << seed;
    ASSERT_EQ(got, want) << "seed " << seed;
  }
}

TEST(Dbscan, RejectsBadParams) {
  const std::vector<GeoPoint> pts{{0, 0}};
  EXPECT_THROW(dbscan(pts, {0.0, 5}), std::invalid_argument);
  EXPECT_THROW(dbscan(pts, {0.5, 0}), std::invalid_argument);
}
