#pragma once

// Hourly EMA averaging, the adjacent-hour (H) and same-day (D) propagated
// variants, and rule-based mood flags.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moodid/types.hpp"

namespace moodid {

struct EmaCell {
  double mean = 0.0;
  /// Raw responses behind `mean`; 0 for values copied in by propagation.
  int responses = 0;

  friend bool operator==(const EmaCell&, const EmaCell&) = default;
};

using EmaCells = std::array<std::optional<EmaCell>, kEmaTopicCount>;

/// Sparse: hours without any value for any topic are absent.
using EmaHourly = std::map<HourKey, EmaCells>;

EmaCells mean_by_topic(std::span<const EmaResponse> responses);
EmaValues values_of(const EmaCells& cells);
bool has_any(const EmaCells& cells);

/// Mean per (subject, hour, topic). Non-EMA events are ignored.
EmaHourly average_hourly(std::span<const TelemetryEvent> events, const StudyWindow& window);
EmaHourly average_hourly(std::span<const EmaResponse> responses, const StudyWindow& window);

/// Variant H. Each original value is copied to h-1 and h+1 (within the grid)
/// for that topic when the neighbour has no original value. Copies are made
/// from the input map only, never from other copies; a gap hour flanked by two
/// originals receives their mean.
EmaHourly propagate_hourly(const EmaHourly& raw, std::int64_t grid_length);

/// Variant D. For every (subject, topic, UTC day) with at least one response,
/// every grid hour of that day carries the day's response-weighted mean.
EmaHourly propagate_daily(const EmaHourly& raw, const StudyWindow& window);

EmaHourly make_variant(DatasetVariant variant, const EmaHourly& raw, const StudyWindow& window);

/// Happy:    sleep = 1 | stress >= 4 | happiness >= 2 | mood = 1
/// Upset:    stress = 3 | (mood = 3 & sleep >= 3) | sadness >= 2
/// Stressed: sleep >= 3 | 1 <= stress <= 3 | mood = 2
/// A missing topic makes its clauses false; equality is exact.
MoodLabels classify_mood(const EmaValues& ema);

struct MoodCounts {
  std::size_t happy = 0;
  std::size_t upset = 0;
  std::size_t stressed = 0;

  std::size_t get(Mood m) const;
  void add(const MoodLabels& l);
  friend bool operator==(const MoodCounts&, const MoodCounts&) = default;
};

struct CoverageReport {
  DatasetVariant variant = DatasetVariant::Raw;
  std::size_t total_samples = 0;
  /// Samples with at least one topic present.
  std::size_t labeled_count = 0;
  double fraction = 0.0;
  std::map<SubjectId, std::size_t> labeled_per_subject;
  std::map<SubjectId, MoodCounts> mood_per_subject;
  MoodCounts mood_totals;
};

CoverageReport coverage_report(DatasetVariant variant, const EmaHourly& ema,
                               std::span<const SubjectId> subjects, std::int64_t grid_length);

/// Dense per-sample labels for one variant, ordered by (subject, hour).
struct LabelTable {
  DatasetVariant variant = DatasetVariant::Raw;
  std::vector<HourKey> keys;
  std::vector<MoodLabels> labels;
  std::vector<EmaValues> ema;
};

LabelTable build_label_table(DatasetVariant variant, const EmaHourly& ema,
                             std::span<const SubjectId> subjects, std::int64_t grid_length);

/// Sparse EMA map recovered from a table (hours without values dropped).
EmaHourly ema_of(const LabelTable& table);

/// CSV columns: subject,hour_index,variant,happy,upset,stressed,
/// ema_stress,ema_mood,ema_sleep,ema_happy,ema_sad (empty when absent).
/// `tags` become leading "# key=value" lines.
void write_label_csv(const LabelTable& table, const std::filesystem::path& path,
                     const std::map<std::string, std::string>& tags = {});
LabelTable read_label_csv(const std::filesystem::path& path,
                          std::map<std::string, std::string>* tags = nullptr);

/// Labels in the order of `rows`. Throws DataError when a row has no entry.
std::vector<MoodLabels> align_labels(const LabelTable& table, std::span<const HourKey> rows);

}  // namespace moodid
