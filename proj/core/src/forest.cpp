#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "moodid/learn.hpp"
#include "moodid/parallel.hpp"

namespace moodid {

namespace {

struct EncodedLabels {
  std::vector<SubjectId> classes;
  std::vector<int> index;
};

EncodedLabels encode(std::span<const SubjectId> y, std::size_t rows) {
  if (y.size() != rows) throw std::invalid_argument("label count does not match row count");
  if (rows == 0) throw DegenerateInputError("no training rows");
  EncodedLabels out;
  out.classes.assign(y.begin(), y.end());
  std::sort(out.classes.begin(), out.classes.end());
  out.classes.erase(std::unique(out.classes.begin(), out.classes.end()), out.classes.end());
  if (out.classes.size() < 2) throw DegenerateInputError("training data holds fewer than two subjects");
  out.index.reserve(y.size());
  for (SubjectId s : y) {
    const auto it = std::lower_bound(out.classes.begin(), out.classes.end(), s);
    out.index.push_back(static_cast<int>(it - out.classes.begin()));
  }
  return out;
}

std::vector<std::size_t> draw_rows(std::size_t n, bool bootstrap, Rng& rng) {
  std::vector<std::size_t> rows(n);
  if (bootstrap) {
    for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
  } else {
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  return rows;
}

}  // namespace

ForestModel fit_forest(MatrixView x, std::span<const SubjectId> y, const ForestParams& params,
                       std::uint64_t seed, unsigned jobs) {
  const EncodedLabels labels = encode(y, x.rows);
  if (params.n_trees == 0) throw std::invalid_argument("forest needs at least one tree");
  ForestModel model;
  model.classes = labels.classes;
  model.n_features = x.cols;
  model.master_seed = seed;
  model.trees.resize(params.n_trees);
  const ColumnMatrix columns(x);
  parallel_for(params.n_trees, jobs, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    const auto rows = draw_rows(x.rows, params.bootstrap, rng);
    model.trees[t] = DecisionTree::fit(columns, labels.index, labels.classes.size(), rows, params.tree, rng);
  });
  return model;
}

std::vector<SubjectId> predict(const ForestModel& model, MatrixView x) {
  if (x.cols != model.n_features) {
    throw std::invalid_argument("predict: model expects " + std::to_string(model.n_features) +
                                " columns, got " + std::to_string(x.cols));
  }
  std::vector<SubjectId> out;
  out.reserve(x.rows);
  std::vector<std::size_t> votes(model.classes.size());
  for (std::size_t r = 0; r < x.rows; ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    const auto row = x.row(r);
    for (const auto& tree : model.trees) ++votes[static_cast<std::size_t>(tree.predict(row))];
    // max_element returns the first maximum, i.e. the smallest subject id.
    const auto best = std::max_element(votes.begin(), votes.end()) - votes.begin();
    out.push_back(model.classes[static_cast<std::size_t>(best)]);
  }
  return out;
}

ImportanceVector extra_trees_importance(MatrixView x, std::span<const SubjectId> y,
                                        const ExtraTreesParams& params, std::uint64_t seed, unsigned jobs) {
  const EncodedLabels labels = encode(y, x.rows);
  if (params.n_estimators == 0) throw std::invalid_argument("extra trees needs at least one estimator");
  std::vector<std::vector<double>> per_tree(params.n_estimators, std::vector<double>(x.cols, 0.0));
  const ColumnMatrix columns(x);
  parallel_for(params.n_estimators, jobs, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    const auto rows = draw_rows(x.rows, params.bootstrap, rng);
    DecisionTree::fit(columns, labels.index, labels.classes.size(), rows, params.tree, rng, &per_tree[t]);
  });

  ImportanceVector total(x.cols, 0.0);
  const double n = static_cast<double>(x.rows);
  for (const auto& imp : per_tree) {
    for (std::size_t c = 0; c < x.cols; ++c) total[c] += imp[c] / n;
  }
  double sum = 0.0;
  for (double& v : total) {
    v /= static_cast<double>(params.n_estimators);
    sum += v;
  }
  if (sum > 0.0) {
    for (double& v : total) v /= sum;
  } else {
    std::fill(total.begin(), total.end(), 0.0);
  }
  return total;
}

FeatureSelection select_features(std::span<const double> importance) {
  FeatureSelection out;
  if (importance.empty()) return out;
  const auto [lo, hi] = std::minmax_element(importance.begin(), importance.end());
  if (*lo == *hi) {
    out.columns.resize(importance.size());
    std::iota(out.columns.begin(), out.columns.end(), std::size_t{0});
    out.disabled = *hi == 0.0;
    return out;
  }
  double sum = 0.0;
  for (double v : importance) sum += v;
  const double mean = sum / static_cast<double>(importance.size());
  for (std::size_t i = 0; i < importance.size(); ++i) {
    if (importance[i] > mean) out.columns.push_back(i);
  }
  if (out.columns.empty()) {
    // Only reachable through rounding in the mean; keep the maxima.
    for (std::size_t i = 0; i < importance.size(); ++i) {
      if (importance[i] == *hi) out.columns.push_back(i);
    }
  }
  return out;
}

std::string ForestModel::to_json() const {
  nlohmann::ordered_json j;
  j["n_features"] = n_features;
  j["master_seed"] = master_seed;
  auto cls = nlohmann::ordered_json::array();
  for (SubjectId s : classes) cls.push_back(s.value);
  j["classes"] = cls;
  auto trees_json = nlohmann::ordered_json::array();
  for (const auto& tree : trees) {
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : tree.nodes()) {
      nlohmann::ordered_json node;
      if (n.feature >= 0) {
        node["feature"] = n.feature;
        node["threshold"] = n.threshold;
        node["left"] = n.left;
        node["right"] = n.right;
      } else {
        node["label"] = n.label;
        node["votes"] = n.votes;
      }
      node["samples"] = n.samples;
      node["gini"] = n.impurity;
      nodes.push_back(std::move(node));
    }
    trees_json.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees_json);
  return j.dump();
}

}  // namespace moodid
