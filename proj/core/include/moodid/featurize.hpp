#pragma once

// Per-hour feature extraction and one-hot encoding.
//
// Column layout of a FeatureMatrix:
//   [apps_<token> ... | gps_<token> ... | call | audio | activity | lock]
// App and GPS tokens are the sorted distinct ids seen in the hour joined by a
// single space ("" when the hour has none). GPS ids are DBSCAN cluster labels,
// with noise written as "n".

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moodid/dbscan.hpp"
#include "moodid/types.hpp"

namespace moodid {

inline constexpr std::size_t kScalarFeatureCount = 4;
inline constexpr std::string_view kNoiseSymbol = "n";

/// Sum of call durations started in the hour; anomalies are kept as-is.
double call_feature(std::span<const double> durations);

/// -1 for no inferences, the unique mode otherwise, 4 when several classes tie.
int mode_code(std::span<const int> classes);

/// Sorted (bytewise) distinct task ids joined by ' '.
std::string app_token(std::span<const std::string> task_ids);

/// Sorted (numeric) distinct cluster labels joined by ' '; noise sorts first and prints as "n".
std::string gps_token(std::span<const int> labels);

struct HourEvents {
  std::vector<double> call_durations;
  std::vector<std::string> app_ids;
  /// Indices into HourBuckets::gps_points().
  std::vector<std::size_t> gps_fixes;
  std::vector<int> audio;
  std::vector<int> activity;
  int locks = 0;
  std::vector<EmaResponse> ema;

  bool empty() const;
};

/// Dense subject x hour grid of events. Every cell exists, even when empty.
class HourBuckets {
 public:
  HourBuckets(std::vector<SubjectId> subjects, std::int64_t grid_length);

  const std::vector<SubjectId>& subjects() const { return subjects_; }
  std::int64_t grid_length() const { return grid_length_; }
  std::size_t size() const { return cells_.size(); }

  std::size_t subject_position(SubjectId s) const;
  HourEvents& at(std::size_t subject_pos, std::int64_t hour);
  const HourEvents& at(std::size_t subject_pos, std::int64_t hour) const;
  const HourEvents& at(const HourKey& key) const;

  /// Every GPS fix in bucketing (input) order.
  const std::vector<GeoPoint>& gps_points() const { return gps_points_; }
  std::vector<GeoPoint>& gps_points() { return gps_points_; }

 private:
  std::vector<SubjectId> subjects_;
  std::map<SubjectId, std::size_t> position_;
  std::int64_t grid_length_;
  std::vector<HourEvents> cells_;
  std::vector<GeoPoint> gps_points_;
};

/// Assigns every event to its (subject, floor((t - start) / 3600)) cell. Calls
/// go wholly to the hour they started in. Throws DataError for events outside
/// the window or from unknown subjects.
HourBuckets bucket_hours(std::span<const TelemetryEvent> events, const StudyWindow& window,
                         std::span<const SubjectId> subjects);

/// Ordered token -> column map. Tokens are kept in sorted order.
class TokenVocabulary {
 public:
  TokenVocabulary() = default;
  explicit TokenVocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;
  /// Throws DataError for a token that was not part of the build set.
  std::size_t index_of(std::string_view token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct FeatureMatrix {
  std::vector<HourKey> rows;
  std::vector<std::string> columns;
  /// Row-major, rows.size() x columns.size().
  std::vector<double> values;

  std::size_t row_count() const { return rows.size(); }
  std::size_t col_count() const { return columns.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * columns.size() + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * columns.size(), columns.size()};
  }
};

/// One sample per grid cell, ordered by (hour, subject). `gps_labels` holds a
/// cluster label per entry of buckets.gps_points().
std::vector<HourSample> extract_samples(const HourBuckets& buckets, std::span<const int> gps_labels);

/// Throws DataError when a sample's token is missing from a vocabulary.
FeatureMatrix build_matrix(std::span<const HourSample> samples, const TokenVocabulary& apps,
                           const TokenVocabulary& gps);

struct FeaturizeOptions {
  DbscanParams dbscan;
};

struct Featurized {
  std::vector<HourSample> samples;
  TokenVocabulary app_vocab;
  TokenVocabulary gps_vocab;
  std::size_t gps_fixes = 0;
  std::size_t gps_clusters = 0;
  FeatureMatrix matrix;
};

/// Full pipeline: bucket, cluster every fix jointly, build both vocabularies
/// over all subjects, encode.
Featurized featurize(std::span<const TelemetryEvent> events, const StudyWindow& window,
                     std::span<const SubjectId> subjects, const FeaturizeOptions& options = {});

/// CSV: leading "# key=value" tags, then "subject,hour_index,<columns>".
void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& path,
                       const std::map<std::string, std::string>& tags = {});
FeatureMatrix read_feature_csv(const std::filesystem::path& path,
                               std::map<std::string, std::string>* tags = nullptr);

}  // namespace moodid
