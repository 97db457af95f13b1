#include "moodid/harness.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <variant>

#include "json.hpp"
#include "moodid/hash.hpp"
#include "moodid/metrics.hpp"
#include "moodid/parallel.hpp"

namespace moodid {

using json = nlohmann::ordered_json;

namespace {

json tree_json(const TreeParams& t) {
  return json{{"max_features", t.max_features},
              {"max_depth", t.max_depth},
              {"min_samples_split", t.min_samples_split}};
}

void read_tree(const json& j, TreeParams& t) {
  if (j.contains("max_features")) t.max_features = j["max_features"].get<std::size_t>();
  if (j.contains("max_depth")) t.max_depth = j["max_depth"].get<std::size_t>();
  if (j.contains("min_samples_split")) t.min_samples_split = j["min_samples_split"].get<std::size_t>();
}

json learn_to_json(const LearnParams& p) {
  json forest = tree_json(p.forest.tree);
  forest["n_trees"] = p.forest.n_trees;
  forest["bootstrap"] = p.forest.bootstrap;
  json selector = tree_json(p.selector.tree);
  selector["n_estimators"] = p.selector.n_estimators;
  selector["bootstrap"] = p.selector.bootstrap;
  return json{{"forest", forest},
              {"selector", selector},
              {"feature_selection", p.feature_selection},
              {"selection_threshold", "mean"}};
}

LearnParams learn_from_json(const json& j) {
  LearnParams p;
  if (j.contains("forest")) {
    const auto& f = j["forest"];
    read_tree(f, p.forest.tree);
    if (f.contains("n_trees")) p.forest.n_trees = f["n_trees"].get<std::size_t>();
    if (f.contains("bootstrap")) p.forest.bootstrap = f["bootstrap"].get<bool>();
  }
  if (j.contains("selector")) {
    const auto& s = j["selector"];
    read_tree(s, p.selector.tree);
    if (s.contains("n_estimators")) p.selector.n_estimators = s["n_estimators"].get<std::size_t>();
    if (s.contains("bootstrap")) p.selector.bootstrap = s["bootstrap"].get<bool>();
  }
  if (j.contains("feature_selection")) p.feature_selection = j["feature_selection"].get<bool>();
  if (j.contains("selection_threshold") && j["selection_threshold"] != "mean") {
    throw std::invalid_argument("only the 'mean' selection threshold is supported");
  }
  if (p.forest.n_trees == 0 || p.selector.n_estimators == 0) {
    throw std::invalid_argument("tree counts must be positive");
  }
  return p;
}

std::vector<double> gather(const FeatureMatrix& m, std::span<const std::size_t> rows,
                           std::span<const std::size_t> cols) {
  std::vector<double> out;
  out.reserve(rows.size() * cols.size());
  for (std::size_t r : rows) {
    const auto row = m.row(r);
    for (std::size_t c : cols) out.push_back(row[c]);
  }
  return out;
}

std::size_t distinct_subjects(const FeatureMatrix& m, std::span<const std::size_t> rows) {
  std::set<SubjectId> s;
  for (std::size_t r : rows) s.insert(m.rows[r].subject);
  return s.size();
}

using Outcome = std::variant<WindowRecord, SkippedWindow>;

}  // namespace

std::string_view regime_keyword(Regime r) {
  switch (r) {
    case Regime::All: return "all";
    case Regime::Exclude: return "exclude";
    case Regime::Only: return "only";
  }
  return "?";
}

std::optional<Regime> parse_regime(std::string_view keyword) {
  for (Regime r : {Regime::All, Regime::Exclude, Regime::Only}) {
    if (regime_keyword(r) == keyword) return r;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (delta < kMinDelta || delta > kMaxDelta) {
    throw std::invalid_argument("delta must be within [4, 24], got " + std::to_string(delta));
  }
  if (stride < 1) throw std::invalid_argument("stride must be at least 1");
  if (regime != Regime::All && variant == DatasetVariant::Raw) {
    throw std::invalid_argument("exclude/only regimes need dataset variant H or D");
  }
}

std::string ExperimentConfig::tag() const {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "d%02d", delta);
  std::string out = std::string(buf) + "_" + std::string(regime_keyword(regime));
  if (regime != Regime::All) {
    out += "_" + std::string(mood_keyword(mood)) + "_" + std::string(variant_keyword(variant));
  }
  return out;
}

std::string learn_params_json(const LearnParams& params) { return learn_to_json(params).dump(); }

LearnParams learn_params_from_json(std::string_view text) {
  try {
    return learn_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("learn params: ") + e.what());
  }
}

std::string config_json(const ExperimentConfig& c) {
  json j;
  j["delta"] = c.delta;
  j["regime"] = regime_keyword(c.regime);
  if (c.regime != Regime::All) {
    j["mood"] = mood_keyword(c.mood);
    j["variant"] = variant_keyword(c.variant);
  }
  j["stride"] = c.stride;
  j["master_seed"] = c.master_seed;
  j["learn"] = learn_to_json(c.learn);
  return j.dump();
}

ExperimentConfig config_from_json(std::string_view text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    c.delta = j.at("delta").get<int>();
    const auto regime = parse_regime(j.at("regime").get<std::string>());
    if (!regime) throw std::invalid_argument("unknown regime");
    c.regime = *regime;
    if (c.regime != Regime::All) {
      const auto mood = parse_mood(j.at("mood").get<std::string>());
      const auto variant = parse_variant(j.at("variant").get<std::string>());
      if (!mood || !variant) throw std::invalid_argument("bad mood or variant");
      c.mood = *mood;
      c.variant = *variant;
    }
    c.stride = j.value("stride", 1);
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("learn")) c.learn = learn_from_json(j["learn"]);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_hash(const ExperimentConfig& config) { return hash_hex(config_json(config)); }

std::vector<Window> make_windows(std::int64_t grid_length, int delta, int stride) {
  if (delta < 0) throw std::invalid_argument("delta must be non-negative");
  if (stride < 1) throw std::invalid_argument("stride must be at least 1");
  if (grid_length <= 2 * static_cast<std::int64_t>(delta) + 1) {
    throw DataError("grid of " + std::to_string(grid_length) + " hours is too short for delta " +
                    std::to_string(delta));
  }
  std::vector<Window> out;
  for (std::int64_t h = 0; h + 2 * delta + 1 < grid_length; h += stride) {
    out.push_back(Window{out.size(), h, h + delta, h + delta + 1, h + 2 * delta + 1});
  }
  return out;
}

bool keeps(Regime regime, Mood mood, const MoodLabels& labels) {
  switch (regime) {
    case Regime::All: return true;
    case Regime::Exclude: return !labels.get(mood);
    case Regime::Only: return labels.get(mood);
  }
  return true;
}

std::vector<std::size_t> filter_regime(std::span<const std::size_t> rows, std::span<const MoodLabels> labels,
                                       Regime regime, Mood mood) {
  std::vector<std::size_t> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) {
    if (regime == Regime::All || keeps(regime, mood, labels[r])) out.push_back(r);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const FeatureMatrix& matrix,
                                std::span<const MoodLabels> labels, unsigned jobs, const RunHooks* hooks) {
  config.validate();
  const std::size_t n = matrix.row_count();
  if (n == 0) throw NoEvaluableWindows("no evaluable windows: feature matrix is empty");
  if (!labels.empty() && labels.size() != n) throw std::invalid_argument("labels are not aligned with matrix rows");
  if (config.regime != Regime::All && labels.empty()) {
    throw std::invalid_argument("exclude/only regimes need mood labels");
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (matrix.rows[r].hour_index < 0) throw DataError("negative hour index in feature matrix");
    if (r > 0 && hour_major_less(matrix.rows[r], matrix.rows[r - 1])) {
      throw DataError("feature matrix rows must be ordered by (hour, subject)");
    }
  }

  const std::int64_t grid_length = matrix.rows.back().hour_index + 1;
  std::vector<std::size_t> hour_begin(static_cast<std::size_t>(grid_length) + 1, n);
  for (std::size_t r = n; r-- > 0;) hour_begin[static_cast<std::size_t>(matrix.rows[r].hour_index)] = r;
  for (std::size_t h = hour_begin.size() - 1; h-- > 0;) hour_begin[h] = std::min(hour_begin[h], hour_begin[h + 1]);

  const std::vector<Window> windows = make_windows(grid_length, config.delta, config.stride);
  std::vector<std::size_t> all_columns(matrix.col_count());
  std::iota(all_columns.begin(), all_columns.end(), std::size_t{0});

  auto rows_between = [&](std::int64_t first, std::int64_t last) {
    std::vector<std::size_t> rows;
    for (std::size_t r = hour_begin[static_cast<std::size_t>(first)];
         r < hour_begin[static_cast<std::size_t>(last) + 1]; ++r) {
      rows.push_back(r);
    }
    return filter_regime(rows, labels, config.regime, config.mood);
  };

  std::vector<Outcome> outcomes(windows.size());
  parallel_for(windows.size(), jobs, [&](std::size_t i) {
    const Window& w = windows[i];
    const auto train = rows_between(w.train_first, w.train_last);
    const auto test = rows_between(w.test_first, w.test_last);
    const std::size_t train_subjects = distinct_subjects(matrix, train);
    const std::size_t test_subjects = distinct_subjects(matrix, test);
    if (train_subjects < 2 || test_subjects < 2) {
      outcomes[i] = SkippedWindow{w.index, w.train_first,
                                  train_subjects < 2
                                      ? "train side has " + std::to_string(train_subjects) + " subject(s)"
                                      : "test side has " + std::to_string(test_subjects) + " subject(s)"};
      return;
    }

    const std::uint64_t window_seed = derive_seed(config.master_seed, w.index);
    std::vector<SubjectId> y_train, y_test;
    for (std::size_t r : train) y_train.push_back(matrix.rows[r].subject);
    for (std::size_t r : test) y_test.push_back(matrix.rows[r].subject);

    FeatureSelection selection;
    if (config.learn.feature_selection) {
      const auto x_all = gather(matrix, train, all_columns);
      const MatrixView view{x_all.data(), train.size(), all_columns.size()};
      const auto importance =
          extra_trees_importance(view, y_train, config.learn.selector, derive_seed(window_seed, 0));
      selection = select_features(importance);
    } else {
      selection.columns = all_columns;
      selection.disabled = true;
    }
    if (hooks && hooks->on_window) hooks->on_window(w, train, train, test);

    const auto x_train = gather(matrix, train, selection.columns);
    const auto x_test = gather(matrix, test, selection.columns);
    const ForestModel model = fit_forest(MatrixView{x_train.data(), train.size(), selection.columns.size()},
                                         y_train, config.learn.forest, derive_seed(window_seed, 1));
    const auto predicted = predict(model, MatrixView{x_test.data(), test.size(), selection.columns.size()});
    const ClassificationReport report = evaluate(y_test, predicted);

    WindowRecord rec;
    rec.window_index = w.index;
    rec.window_start_hour = w.train_first;
    rec.train_size = train.size();
    rec.test_size = test.size();
    rec.train_subjects = train_subjects;
    rec.test_subjects = test_subjects;
    rec.f_score = report.macro_f;
    rec.precision = report.macro_precision;
    rec.recall = report.macro_recall;
    rec.micro_f = report.micro_f;
    rec.weighted_f = report.weighted_f;
    rec.selected_columns = std::move(selection.columns);
    rec.selection_disabled = selection.disabled;
    outcomes[i] = std::move(rec);
  });

  ExperimentResult result;
  result.config = config;
  result.columns = matrix.columns;
  for (auto& o : outcomes) {
    if (auto* rec = std::get_if<WindowRecord>(&o)) {
      result.windows.push_back(std::move(*rec));
    } else {
      result.skipped.push_back(std::get<SkippedWindow>(std::move(o)));
    }
  }
  if (result.windows.empty()) {
    throw NoEvaluableWindows("no evaluable windows for " + config.tag() + " (" +
                             std::to_string(result.skipped.size()) + " skipped)");
  }
  result.min_f = result.max_f = result.windows.front().f_score;
  for (const auto& w : result.windows) {
    result.mean_f += w.f_score;
    result.mean_precision += w.precision;
    result.mean_recall += w.recall;
    result.mean_micro_f += w.micro_f;
    result.mean_weighted_f += w.weighted_f;
    result.min_f = std::min(result.min_f, w.f_score);
    result.max_f = std::max(result.max_f, w.f_score);
  }
  const double k = static_cast<double>(result.windows.size());
  result.mean_f /= k;
  result.mean_precision /= k;
  result.mean_recall /= k;
  result.mean_micro_f /= k;
  result.mean_weighted_f /= k;
  return result;
}

std::vector<SaliencyEntry> saliency_frequencies(std::span<const ExperimentResult> results, std::size_t top_k) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& result : results) {
    for (const auto& w : result.windows) {
      if (w.selection_disabled) continue;
      for (std::size_t c : w.selected_columns) {
        if (c >= result.columns.size()) throw DataError("selected column index out of range");
        ++counts[result.columns[c]];
        ++total;
      }
    }
  }
  if (total == 0) throw DataError("no feature-selection events to summarize");
  std::vector<SaliencyEntry> out;
  out.reserve(counts.size());
  for (const auto& [name, count] : counts) {
    out.push_back({name, count, static_cast<double>(count) / static_cast<double>(total)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SaliencyEntry& a, const SaliencyEntry& b) { return a.count > b.count; });
  if (top_k > 0 && out.size() > top_k) out.resize(top_k);
  return out;
}

CorrelationMatrix ema_correlations(const EmaHourly& hourly, const EmaHourly& daily) {
  constexpr std::size_t k = 2 * kEmaTopicCount;
  CorrelationMatrix m;
  for (EmaTopic t : kEmaTopics) m.names.emplace_back(topic_keyword(t));
  for (EmaTopic t : kEmaTopics) m.names.push_back("D_" + std::string(topic_keyword(t)));

  std::map<HourKey, std::array<std::optional<double>, k>> samples;
  for (const auto& [key, cells] : hourly) {
    for (std::size_t t = 0; t < kEmaTopicCount; ++t) {
      if (cells[t]) samples[key][t] = cells[t]->mean;
    }
  }
  for (const auto& [key, cells] : daily) {
    for (std::size_t t = 0; t < kEmaTopicCount; ++t) {
      if (cells[t]) samples[key][kEmaTopicCount + t] = cells[t]->mean;
    }
  }

  m.r.assign(k * k, std::nullopt);
  m.pairs.assign(k * k, 0);
  std::vector<double> xs, ys;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      xs.clear();
      ys.clear();
      for (const auto& [key, values] : samples) {
        if (values[a] && values[b]) {
          xs.push_back(*values[a]);
          ys.push_back(*values[b]);
        }
      }
      auto r = pearson(xs, ys);
      if (a == b && r) r = 1.0;
      m.r[a * k + b] = m.r[b * k + a] = r;
      m.pairs[a * k + b] = m.pairs[b * k + a] = xs.size();
    }
  }
  return m;
}

}  // namespace moodid
