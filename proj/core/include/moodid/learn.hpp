#pragma once

// CART classification trees, a bagged random forest, extremely randomized
// trees for impurity-based importance, and importance-threshold selection.
//
// Every tree draws from its own RNG stream derived from (seed, tree index), so
// fitted models are bit-identical at any thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "moodid/errors.hpp"
#include "moodid/rng.hpp"
#include "moodid/types.hpp"

namespace moodid {

/// Non-owning row-major matrix.
struct MatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data + r * cols, cols}; }
};

/// Column-major copy of a matrix; trees scan one column at a time.
class ColumnMatrix {
 public:
  explicit ColumnMatrix(MatrixView x);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const double* column(std::size_t c) const { return data_.data() + c * rows_; }

 private:
  std::vector<double> data_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

/// Fewer than two classes, or no rows: nothing to discriminate.
class DegenerateInputError : public DataError {
 public:
  using DataError::DataError;
};

/// 1 - sum(p_c^2) over (possibly unnormalized) class counts. 0 for an empty node.
double gini_impurity(std::span<const double> class_counts);

enum class ThresholdRule : std::uint8_t {
  BestMidpoint,   // exhaustive scan over midpoints between distinct values
  UniformRandom,  // one uniform draw in (min, max) per candidate column
};

struct TreeParams {
  /// Candidate columns evaluated per node; 0 means ceil(sqrt(d)). Columns that
  /// are constant within the node are skipped and do not count.
  std::size_t max_features = 0;
  /// 0 means unlimited.
  std::size_t max_depth = 0;
  std::size_t min_samples_split = 2;
  ThresholdRule thresholds = ThresholdRule::BestMidpoint;
};

class DecisionTree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 for leaves
    double threshold = 0.0;     // x <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t label = 0;     // majority class; ties to the smaller index
    std::uint32_t samples = 0;
    double impurity = 0.0;
    std::vector<std::uint32_t> votes;  // class histogram, leaves only
  };

  /// Grows a tree over `rows` (duplicates allowed, as in bootstrap samples).
  /// Labels are class indices in [0, n_classes). When `importance` is given,
  /// each split adds n_t*G_t - n_l*G_l - n_r*G_r to its column.
  static DecisionTree fit(MatrixView x, std::span<const int> y, std::size_t n_classes,
                          std::span<const std::size_t> rows, const TreeParams& params, Rng& rng,
                          std::vector<double>* importance = nullptr);
  static DecisionTree fit(const ColumnMatrix& x, std::span<const int> y, std::size_t n_classes,
                          std::span<const std::size_t> rows, const TreeParams& params, Rng& rng,
                          std::vector<double>* importance = nullptr);

  int predict(std::span<const double> row) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;

 private:
  std::vector<Node> nodes_;
};

struct ForestParams {
  std::size_t n_trees = 250;
  bool bootstrap = true;
  TreeParams tree{};
};

struct ExtraTreesParams {
  std::size_t n_estimators = 50;
  bool bootstrap = false;
  TreeParams tree{.thresholds = ThresholdRule::UniformRandom};
};

struct ForestModel {
  /// Sorted ascending; trees predict indices into this list.
  std::vector<SubjectId> classes;
  std::vector<DecisionTree> trees;
  std::size_t n_features = 0;
  std::uint64_t master_seed = 0;

  /// Inspection dump; not a stable interchange format.
  std::string to_json() const;
};

/// Throws DegenerateInputError with fewer than two distinct labels.
ForestModel fit_forest(MatrixView x, std::span<const SubjectId> y, const ForestParams& params,
                       std::uint64_t seed, unsigned jobs = 1);

/// Majority vote over trees; ties go to the smallest SubjectId. Throws
/// std::invalid_argument on a column-count mismatch.
std::vector<SubjectId> predict(const ForestModel& model, MatrixView x);

/// Per-column mean impurity decrease, normalized to sum to 1 (all zeros when
/// no tree split at all).
using ImportanceVector = std::vector<double>;

ImportanceVector extra_trees_importance(MatrixView x, std::span<const SubjectId> y,
                                        const ExtraTreesParams& params, std::uint64_t seed,
                                        unsigned jobs = 1);

struct FeatureSelection {
  std::vector<std::size_t> columns;
  /// True when the importances carried no information and every column was kept.
  bool disabled = false;
};

/// Columns whose importance is strictly above the mean importance. All columns
/// when every importance is equal (including the all-zero vector).
FeatureSelection select_features(std::span<const double> importance);

}  // namespace moodid
