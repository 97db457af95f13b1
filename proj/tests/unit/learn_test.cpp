#include <gtest/gtest.h>

#include <map>
#include <set>

#include "moodid/errors.hpp"
#include "moodid/learn.hpp"
#include "oracles/cart_oracle.hpp"

using namespace moodid;

namespace {

struct Data {
  std::vector<double> x;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<SubjectId> y;

  MatrixView view() const { return {x.data(), rows, cols}; }
  std::vector<int> indices() const {
    std::vector<int> out;
    for (auto s : y) out.push_back(static_cast<int>(s.value));
    return out;
  }
};

// Subject s uses one-hot column s of the first block plus noise columns.
Data separable(std::size_t subjects, std::size_t per_subject, std::size_t noise, std::uint64_t seed) {
  Rng rng(seed);
  Data d;
  d.cols = subjects + noise;
  for (std::size_t s = 0; s < subjects; ++s) {
    for (std::size_t i = 0; i < per_subject; ++i) {
      for (std::size_t c = 0; c < subjects; ++c) d.x.push_back(c == s ? 1.0 : 0.0);
      for (std::size_t c = 0; c < noise; ++c) d.x.push_back(static_cast<double>(rng.below(3)));
      d.y.push_back(SubjectId{static_cast<std::uint32_t>(s)});
      ++d.rows;
    }
  }
  return d;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

}  // namespace

TEST(Gini, ConstructedHistograms) {
  EXPECT_EQ(gini_impurity(std::vector<double>{10, 0}), 0.0);
  EXPECT_EQ(gini_impurity(std::vector<double>{5, 5}), 0.5);
  EXPECT_NEAR(gini_impurity(std::vector<double>{1, 1, 1}), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(gini_impurity(std::vector<double>{}), 0.0);
  EXPECT_EQ(gini_impurity(std::vector<double>{0, 0}), 0.0);
}

TEST(Tree, SeparatingColumnGivesPerfectTraining) {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.7, 0.8, 0.9};
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  Rng rng(1);
  const auto rows = all_rows(6);
  const auto tree = DecisionTree::fit(MatrixView{x.data(), 6, 1}, y, 2, rows, {}, rng);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(tree.predict(std::span<const double>(&x[i], 1)), y[i]);
  EXPECT_EQ(tree.leaf_count(), 2u);
  EXPECT_DOUBLE_EQ(tree.nodes()[0].threshold, 0.5);
}

TEST(Tree, ConstantColumnsGiveSingleLeafMajority) {
  const std::vector<double> x(12, 3.0);
  const std::vector<int> y{1, 0, 1, 1, 0, 1};
  Rng rng(2);
  const auto rows = all_rows(6);
  const auto tree = DecisionTree::fit(MatrixView{x.data(), 6, 2}, y, 2, rows, {}, rng);
  EXPECT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.predict(std::span<const double>(x.data(), 2)), 1);
}

TEST(Tree, MajorityTiesGoToSmallerClass) {
  const std::vector<double> x(4, 0.0);
  const std::vector<int> y{1, 0, 0, 1};
  Rng rng(3);
  const auto rows = all_rows(4);
  const auto tree = DecisionTree::fit(MatrixView{x.data(), 4, 1}, y, 2, rows, {}, rng);
  EXPECT_EQ(tree.predict(std::span<const double>(x.data(), 1)), 0);
}

TEST(Tree, MatchesExhaustiveSplitOracle) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng gen(seed);
    const std::size_t n = 2 + gen.below(19);
    const std::size_t d = 1 + gen.below(3);
    const std::size_t k = 2 + gen.below(3);
    oracle::Rows rows(n, std::vector<double>(d));
    std::vector<int> y(n);
    std::vector<double> flat;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        rows[i][c] = static_cast<double>(gen.below(5)) * 0.5;
        flat.push_back(rows[i][c]);
      }
      y[i] = static_cast<int>(gen.below(k));
    }
    Rng rng(seed + 1000);
    TreeParams params;
    params.max_features = d;
    const auto idx = all_rows(n);
    const auto tree = DecisionTree::fit(MatrixView{flat.data(), n, d}, y, k, idx, params, rng);

    const double best = oracle::best_split_impurity(rows, y);
    const auto& root = tree.nodes()[0];
    if (oracle::gini(y) == 0.0 || best == std::numeric_limits<double>::infinity()) {
      ASSERT_LT(root.feature, 0) << "seed " << seed;
    } else {
      ASSERT_GE(root.feature, 0) << "seed " << seed;
      const auto& l = tree.nodes()[static_cast<std::size_t>(root.left)];
      const auto& r = tree.nodes()[static_cast<std::size_t>(root.right)];
      const double got = (l.samples * l.impurity + r.samples * r.impurity) / static_cast<double>(n);
      ASSERT_NEAR(got, best, 1e-12) << "seed " << seed;
    }
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(tree.predict(rows[i]), oracle::grown_tree_training_prediction(rows, y, i))
          << "seed " << seed << " row " << i;
    }
  }
}

TEST(Forest, SeparableDataPredictsGroundTruth) {
  const auto train = separable(4, 20, 3, 1);
  const auto test = separable(4, 5, 3, 2);
  ForestParams p;
  p.n_trees = 50;
  const auto model = fit_forest(train.view(), train.y, p, 11);
  EXPECT_EQ(predict(model, test.view()), test.y);
}

TEST(Forest, NoBootstrapGivesPerfectTrainingAccuracy) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    Data d;
    d.cols = 4;
    std::set<std::vector<double>> seen;
    while (d.rows < 60) {
      std::vector<double> row;
      for (std::size_t c = 0; c < d.cols; ++c) row.push_back(static_cast<double>(rng.below(4)));
      if (!seen.insert(row).second) continue;
      d.x.insert(d.x.end(), row.begin(), row.end());
      d.y.push_back(SubjectId{static_cast<std::uint32_t>(rng.below(5))});
      ++d.rows;
    }
    ForestParams p;
    p.n_trees = 20;
    p.bootstrap = false;
    const auto model = fit_forest(d.view(), d.y, p, seed);
    EXPECT_EQ(predict(model, d.view()), d.y) << "seed " << seed;
  }
}

TEST(Forest, ConstantFeaturesPredictMajority) {
  Data d;
  d.cols = 3;
  d.rows = 7;
  d.x.assign(21, 1.0);
  for (std::uint32_t s : {4u, 2u, 4u, 9u, 4u, 2u, 9u}) d.y.push_back(SubjectId{s});
  ForestParams p;
  p.n_trees = 10;
  p.bootstrap = false;
  const auto model = fit_forest(d.view(), d.y, p, 5);
  for (const auto& t : model.trees) EXPECT_EQ(t.nodes().size(), 1u);
  const auto pred = predict(model, d.view());
  for (auto s : pred) EXPECT_EQ(s, SubjectId{4});
}

TEST(Forest, VoteTieGoesToSmallerSubject) {
  // One-class subsets make single-leaf trees with a known vote.
  const std::vector<double> x{0.0, 0.0};
  const std::vector<int> y{0, 1};
  Rng rng(0);
  const std::vector<std::size_t> only_first{0}, only_second{1};
  const auto votes_3 = DecisionTree::fit(MatrixView{x.data(), 2, 1}, y, 2, only_first, {}, rng);
  const auto votes_7 = DecisionTree::fit(MatrixView{x.data(), 2, 1}, y, 2, only_second, {}, rng);
  ForestModel model;
  model.classes = {SubjectId{3}, SubjectId{7}};
  model.n_features = 1;
  for (int i = 0; i < 125; ++i) model.trees.push_back(votes_7);
  for (int i = 0; i < 125; ++i) model.trees.push_back(votes_3);
  EXPECT_EQ(predict(model, MatrixView{x.data(), 1, 1}), std::vector<SubjectId>{SubjectId{3}});
  model.trees.push_back(votes_7);
  EXPECT_EQ(predict(model, MatrixView{x.data(), 1, 1}), std::vector<SubjectId>{SubjectId{7}});
}

TEST(Forest, DeterministicAcrossRunsAndThreads) {
  const auto d = separable(5, 15, 6, 3);
  ForestParams p;
  p.n_trees = 40;
  const auto a = fit_forest(d.view(), d.y, p, 99, 1);
  const auto b = fit_forest(d.view(), d.y, p, 99, 1);
  const auto c = fit_forest(d.view(), d.y, p, 99, 4);
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_EQ(a.to_json(), c.to_json());
  const auto other = fit_forest(d.view(), d.y, p, 100, 1);
  EXPECT_NE(a.to_json(), other.to_json());
}

TEST(Forest, Errors) {
  Data one;
  one.cols = 1;
  one.rows = 3;
  one.x = {1, 2, 3};
  one.y.assign(3, SubjectId{1});
  EXPECT_THROW(fit_forest(one.view(), one.y, {}, 1), DegenerateInputError);
  Data empty;
  empty.cols = 1;
  EXPECT_THROW(fit_forest(empty.view(), empty.y, {}, 1), DegenerateInputError);

  const auto d = separable(2, 4, 0, 1);
  ForestParams none;
  none.n_trees = 0;
  EXPECT_THROW(fit_forest(d.view(), d.y, none, 1), std::invalid_argument);
  const std::vector<SubjectId> short_y{SubjectId{0}};
  EXPECT_THROW(fit_forest(d.view(), short_y, {}, 1), std::invalid_argument);

  ForestParams p;
  p.n_trees = 2;
  const auto model = fit_forest(d.view(), d.y, p, 1);
  const std::vector<double> wide(3, 0.0);
  EXPECT_THROW(predict(model, MatrixView{wide.data(), 1, 3}), std::invalid_argument);
}

TEST(ExtraTrees, LabelCopyColumnDominates) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    Data d;
    d.cols = 8;
    for (std::size_t i = 0; i < 200; ++i) {
      const auto s = static_cast<std::uint32_t>(rng.below(4));
      for (std::size_t c = 0; c < d.cols; ++c) d.x.push_back(c == 3 ? s : rng.uniform());
      d.y.push_back(SubjectId{s});
      ++d.rows;
    }
    const auto imp = extra_trees_importance(d.view(), d.y, {}, seed);
    ASSERT_EQ(imp.size(), 8u);
    for (std::size_t c = 0; c < d.cols; ++c) {
      if (c == 3) continue;
      ASSERT_GT(imp[3], imp[c]) << "seed " << seed << " column " << c;
    }
    double sum = 0;
    for (double v : imp) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(ExtraTrees, ConstantInputGivesZeroVector) {
  Data d;
  d.cols = 3;
  d.rows = 6;
  d.x.assign(18, 2.0);
  for (std::uint32_t s : {1u, 2u, 1u, 2u, 1u, 2u}) d.y.push_back(SubjectId{s});
  const auto imp = extra_trees_importance(d.view(), d.y, {}, 4);
  EXPECT_EQ(imp, std::vector<double>(3, 0.0));
}

TEST(ExtraTrees, DeterministicAcrossThreads) {
  const auto d = separable(4, 10, 5, 8);
  EXPECT_EQ(extra_trees_importance(d.view(), d.y, {}, 3, 1), extra_trees_importance(d.view(), d.y, {}, 3, 4));
}

TEST(Selection, Examples) {
  const auto a = select_features(std::vector<double>{0.7, 0.2, 0.1});
  EXPECT_EQ(a.columns, std::vector<std::size_t>{0});
  EXPECT_FALSE(a.disabled);
  const auto b = select_features(std::vector<double>{0.25, 0.25, 0.25, 0.25});
  EXPECT_EQ(b.columns, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_FALSE(b.disabled);
  const auto c = select_features(std::vector<double>{0, 0, 0});
  EXPECT_EQ(c.columns, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_TRUE(c.disabled);
  EXPECT_TRUE(select_features({}).columns.empty());
}

TEST(Selection, StrictlyAboveMean) {
  const auto s = select_features(std::vector<double>{0.3, 0.3, 0.2, 0.2});
  EXPECT_EQ(s.columns, (std::vector<std::size_t>{0, 1}));
}
