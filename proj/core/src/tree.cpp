#include <algorithm>
#include <cmath>
#include <limits>

#include "moodid/learn.hpp"

namespace moodid {

double gini_impurity(std::span<const double> class_counts) {
  double total = 0.0;
  for (double c : class_counts) total += c;
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : class_counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

namespace {

struct Task {
  std::size_t begin;
  std::size_t end;
  std::size_t depth;
  std::int32_t node;
  std::size_t known_constants;
};

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

double gini_of(const std::vector<std::int64_t>& counts, std::int64_t n) {
  if (n == 0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

std::int32_t majority(const std::vector<std::int64_t>& counts) {
  std::int32_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<std::int32_t>(c);
  }
  return best;
}

// Sum over children of (sum_c n_c^2) / n_child. Maximizing this minimizes the
// weighted child Gini impurity.
double split_score(std::int64_t left_sq, std::int64_t nl, std::int64_t right_sq, std::int64_t nr) {
  return static_cast<double>(left_sq) / static_cast<double>(nl) +
         static_cast<double>(right_sq) / static_cast<double>(nr);
}

}  // namespace

ColumnMatrix::ColumnMatrix(MatrixView x) : data_(x.rows * x.cols), rows_(x.rows), cols_(x.cols) {
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* row = x.data + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) data_[c * rows_ + r] = row[c];
  }
}

DecisionTree DecisionTree::fit(MatrixView x, std::span<const int> y, std::size_t n_classes,
                               std::span<const std::size_t> rows, const TreeParams& params, Rng& rng,
                               std::vector<double>* importance) {
  return fit(ColumnMatrix(x), y, n_classes, rows, params, rng, importance);
}

DecisionTree DecisionTree::fit(const ColumnMatrix& x, std::span<const int> y, std::size_t n_classes,
                               std::span<const std::size_t> rows, const TreeParams& params, Rng& rng,
                               std::vector<double>* importance) {
  DecisionTree tree;
  if (rows.empty()) throw DegenerateInputError("cannot fit a tree on zero rows");
  const std::size_t d = x.cols();
  const std::size_t max_features =
      params.max_features > 0 ? std::min(params.max_features, d)
                              : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  const std::size_t min_split = std::max<std::size_t>(params.min_samples_split, 2);

  std::vector<std::size_t> samples(rows.begin(), rows.end());
  // features[0, known) holds columns already constant in an ancestor; the
  // same prefix of `constants` preserves their order for siblings.
  std::vector<std::size_t> features(d), constants(d);
  for (std::size_t i = 0; i < d; ++i) features[i] = i;

  std::vector<std::int64_t> counts(n_classes), left(n_classes), right(n_classes);
  std::vector<std::pair<double, int>> column;
  std::vector<Task> stack;

  tree.nodes_.emplace_back();
  stack.push_back({0, samples.size(), 0, 0, 0});

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    const auto n = static_cast<std::int64_t>(task.end - task.begin);

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = task.begin; i < task.end; ++i) ++counts[static_cast<std::size_t>(y[samples[i]])];
    const double node_gini = gini_of(counts, n);

    auto make_leaf = [&] {
      Node& node = tree.nodes_[static_cast<std::size_t>(task.node)];
      node.samples = static_cast<std::uint32_t>(n);
      node.impurity = node_gini;
      node.label = majority(counts);
      node.votes.assign(counts.begin(), counts.end());
    };

    if (node_gini <= 0.0 || n < static_cast<std::int64_t>(min_split) ||
        (params.max_depth > 0 && task.depth >= params.max_depth)) {
      make_leaf();
      continue;
    }

    std::int64_t node_sq = 0;
    for (auto c : counts) node_sq += c * c;

    Split best;
    // Sampling without replacement over columns not known to be constant.
    // Newly found constants are moved next to the known ones.
    const std::size_t known = task.known_constants;
    std::size_t f_i = d;
    std::size_t drawn_constants = 0;
    std::size_t found_constants = 0;
    std::size_t total_constants = known;
    std::size_t visited = 0;
    while (f_i > total_constants && visited < max_features) {
      std::size_t f_j = drawn_constants + static_cast<std::size_t>(rng.below(f_i - found_constants - drawn_constants));
      if (f_j < known) {
        std::swap(features[drawn_constants], features[f_j]);
        ++drawn_constants;
        continue;
      }
      f_j += found_constants;
      const std::size_t f = features[f_j];
      const double* col = x.column(f);

      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = task.begin; i < task.end; ++i) {
        const double v = col[samples[i]];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(lo < hi)) {
        std::swap(features[f_j], features[total_constants]);
        ++found_constants;
        ++total_constants;
        continue;
      }
      --f_i;
      std::swap(features[f_i], features[f_j]);
      ++visited;

      std::int64_t right_sq = node_sq;

      if (params.thresholds == ThresholdRule::UniformRandom) {
        double threshold = lo + rng.uniform() * (hi - lo);
        if (threshold >= hi) threshold = lo;
        std::fill(left.begin(), left.end(), 0);
        std::int64_t nl = 0;
        for (std::size_t i = task.begin; i < task.end; ++i) {
          if (col[samples[i]] <= threshold) {
            ++left[static_cast<std::size_t>(y[samples[i]])];
            ++nl;
          }
        }
        std::int64_t lsq = 0, rsq = 0;
        for (std::size_t c = 0; c < n_classes; ++c) {
          lsq += left[c] * left[c];
          rsq += (counts[c] - left[c]) * (counts[c] - left[c]);
        }
        const double score = split_score(lsq, nl, rsq, n - nl);
        if (score > best.score) best = {static_cast<std::int32_t>(f), threshold, score};
        continue;
      }

      // Two-valued columns (one-hot indicators) have a single candidate
      // boundary; skip the sort.
      bool two_valued = true;
      std::fill(left.begin(), left.end(), 0);
      std::int64_t nl = 0;
      for (std::size_t i = task.begin; i < task.end; ++i) {
        const double v = col[samples[i]];
        if (v == lo) {
          ++left[static_cast<std::size_t>(y[samples[i]])];
          ++nl;
        } else if (v != hi) {
          two_valued = false;
          break;
        }
      }
      if (two_valued) {
        std::int64_t lsq = 0, rsq = 0;
        for (std::size_t c = 0; c < n_classes; ++c) {
          lsq += left[c] * left[c];
          rsq += (counts[c] - left[c]) * (counts[c] - left[c]);
        }
        const double score = split_score(lsq, nl, rsq, n - nl);
        if (score > best.score) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = {static_cast<std::int32_t>(f), mid, score};
        }
        continue;
      }

      column.clear();
      for (std::size_t i = task.begin; i < task.end; ++i) column.emplace_back(col[samples[i]], y[samples[i]]);
      std::sort(column.begin(), column.end());
      std::fill(left.begin(), left.end(), 0);
      std::copy(counts.begin(), counts.end(), right.begin());
      std::int64_t left_sq = 0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        const auto c = static_cast<std::size_t>(column[i].second);
        left_sq += 2 * left[c] + 1;
        ++left[c];
        right_sq -= 2 * right[c] - 1;
        --right[c];
        const double v = column[i].first;
        const double next = column[i + 1].first;
        if (!(v < next)) continue;
        const auto nl = static_cast<std::int64_t>(i + 1);
        const double score = split_score(left_sq, nl, right_sq, n - nl);
        if (score > best.score) {
          double mid = v + (next - v) / 2.0;
          if (!(mid < next)) mid = v;
          best = {static_cast<std::int32_t>(f), mid, score};
        }
      }
    }
    std::copy(constants.begin(), constants.begin() + static_cast<std::ptrdiff_t>(known), features.begin());
    std::copy(features.begin() + static_cast<std::ptrdiff_t>(known),
              features.begin() + static_cast<std::ptrdiff_t>(total_constants),
              constants.begin() + static_cast<std::ptrdiff_t>(known));

    if (best.feature < 0) {
      make_leaf();
      continue;
    }

    const auto f = static_cast<std::size_t>(best.feature);
    const auto mid_it = std::partition(samples.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                       samples.begin() + static_cast<std::ptrdiff_t>(task.end),
                                       [&, col = x.column(f)](std::size_t r) { return col[r] <= best.threshold; });
    const auto split_at = static_cast<std::size_t>(mid_it - samples.begin());

    if (importance) {
      std::fill(left.begin(), left.end(), 0);
      for (std::size_t i = task.begin; i < split_at; ++i) ++left[static_cast<std::size_t>(y[samples[i]])];
      for (std::size_t c = 0; c < n_classes; ++c) right[c] = counts[c] - left[c];
      const auto nl = static_cast<std::int64_t>(split_at - task.begin);
      const auto nr = n - nl;
      (*importance)[f] += static_cast<double>(n) * node_gini -
                          static_cast<double>(nl) * gini_of(left, nl) -
                          static_cast<double>(nr) * gini_of(right, nr);
    }

    const auto left_id = static_cast<std::int32_t>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    const auto right_id = static_cast<std::int32_t>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    Node& node = tree.nodes_[static_cast<std::size_t>(task.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_id;
    node.right = right_id;
    node.samples = static_cast<std::uint32_t>(n);
    node.impurity = node_gini;
    node.label = majority(counts);

    stack.push_back({split_at, task.end, task.depth + 1, right_id, total_constants});
    stack.push_back({task.begin, split_at, task.depth + 1, left_id, total_constants});
  }
  return tree;
}

int DecisionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const Node& node = nodes_[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                : node.right);
  }
  return nodes_[i].label;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

}  // namespace moodid
