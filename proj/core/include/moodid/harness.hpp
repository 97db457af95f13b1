#pragma once

// Sliding-window identification experiments.
//
// For every start hour h (stepping by `stride`) the window trains on hours
// [h, h+delta] and tests on [h+delta+1, h+2*delta+1], inclusive, across all
// subjects. Within each window: regime filter on both sides, extra-trees
// importance on the training rows, mean-threshold selection, random forest on
// the selected columns, macro-averaged F over the subjects in the test set.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moodid/errors.hpp"
#include "moodid/featurize.hpp"
#include "moodid/learn.hpp"
#include "moodid/mood.hpp"
#include "moodid/types.hpp"

namespace moodid {

enum class Regime : std::uint8_t { All, Exclude, Only };

std::string_view regime_keyword(Regime r);  // all|exclude|only
std::optional<Regime> parse_regime(std::string_view keyword);

inline constexpr int kMinDelta = 4;
inline constexpr int kMaxDelta = 24;

struct LearnParams {
  ForestParams forest{};
  ExtraTreesParams selector{};
  /// When false the forest sees every column.
  bool feature_selection = true;
};

struct ExperimentConfig {
  int delta = kMinDelta;
  Regime regime = Regime::All;
  /// Ignored for Regime::All.
  Mood mood = Mood::Happy;
  /// Must be H or D for Exclude/Only.
  DatasetVariant variant = DatasetVariant::Raw;
  LearnParams learn{};
  std::uint64_t master_seed = 0;
  int stride = 1;

  /// Throws std::invalid_argument.
  void validate() const;
  /// Short tag such as "d04_exclude_happy_H" or "d04_all".
  std::string tag() const;
};

/// Canonical JSON used for hashing and persistence.
std::string config_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(std::string_view json);
std::string config_hash(const ExperimentConfig& config);

struct Window {
  std::size_t index = 0;
  std::int64_t train_first = 0;
  std::int64_t train_last = 0;
  std::int64_t test_first = 0;
  std::int64_t test_last = 0;

  friend bool operator==(const Window&, const Window&) = default;
};

/// Throws DataError when grid_length <= 2*delta + 1.
std::vector<Window> make_windows(std::int64_t grid_length, int delta, int stride = 1);

/// Whether a sample with `labels` survives `regime` for `mood`.
bool keeps(Regime regime, Mood mood, const MoodLabels& labels);

/// Subset of `rows` (indices into `labels`) surviving the regime, order kept.
std::vector<std::size_t> filter_regime(std::span<const std::size_t> rows, std::span<const MoodLabels> labels,
                                       Regime regime, Mood mood);

struct WindowRecord {
  std::size_t window_index = 0;
  std::int64_t window_start_hour = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t train_subjects = 0;
  std::size_t test_subjects = 0;
  /// Macro-averaged over subjects present in the test rows.
  double f_score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double micro_f = 0.0;
  double weighted_f = 0.0;
  std::vector<std::size_t> selected_columns;
  bool selection_disabled = false;
};

struct SkippedWindow {
  std::size_t window_index = 0;
  std::int64_t window_start_hour = 0;
  std::string reason;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::string> columns;
  std::vector<WindowRecord> windows;
  std::vector<SkippedWindow> skipped;
  double mean_f = 0.0;
  double min_f = 0.0;
  double max_f = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_micro_f = 0.0;
  double mean_weighted_f = 0.0;
};

class NoEvaluableWindows : public DataError {
 public:
  using DataError::DataError;
};

/// Observation points for tests and tooling. Row lists index the matrix.
struct RunHooks {
  std::function<void(const Window&, std::span<const std::size_t> selector_rows,
                     std::span<const std::size_t> forest_rows, std::span<const std::size_t> test_rows)>
      on_window;
};

/// `labels` is aligned with matrix rows; it may be empty for Regime::All.
/// Matrix rows must be ordered by (hour, subject). Windows whose train or test
/// side has fewer than two subjects are skipped and logged. Throws
/// NoEvaluableWindows when every window is skipped. The result is identical
/// for any `jobs`.
ExperimentResult run_experiment(const ExperimentConfig& config, const FeatureMatrix& matrix,
                                std::span<const MoodLabels> labels, unsigned jobs = 1,
                                const RunHooks* hooks = nullptr);

struct SaliencyEntry {
  std::string feature;
  std::size_t count = 0;
  double frequency = 0.0;
};

/// Selection counts across every window of every result, normalized by the
/// total number of selection events. Windows where selection was disabled do
/// not count. Sorted by frequency descending, then name. `top_k` = 0 keeps all.
/// Throws DataError when there are no selection events.
std::vector<SaliencyEntry> saliency_frequencies(std::span<const ExperimentResult> results,
                                                std::size_t top_k = 0);

struct CorrelationMatrix {
  std::vector<std::string> names;
  /// Row-major; nullopt where the coefficient is undefined.
  std::vector<std::optional<double>> r;
  std::vector<std::size_t> pairs;

  std::size_t size() const { return names.size(); }
  const std::optional<double>& at(std::size_t i, std::size_t j) const { return r[i * names.size() + j]; }
};

/// Pearson r between every pair of the ten variables (five hourly topics, then
/// the five daily ones prefixed "D_"), computed over subject-hours where both
/// are present.
CorrelationMatrix ema_correlations(const EmaHourly& hourly, const EmaHourly& daily);

}  // namespace moodid

namespace moodid {

std::string learn_params_json(const LearnParams& params);
/// Missing keys keep their defaults. Throws std::invalid_argument on bad values.
LearnParams learn_params_from_json(std::string_view json);

}  // namespace moodid
