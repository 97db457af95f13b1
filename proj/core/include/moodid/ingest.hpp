#pragma once

// Flat-file dataset layout: one UTF-8 CSV per event kind plus a JSON manifest.
//
//   calls.csv     subject,start_epoch_s,duration_min
//   apps.csv      subject,epoch_s,task_id
//   gps.csv       subject,epoch_s,lat,lon
//   audio.csv     subject,epoch_s,class
//   activity.csv  subject,epoch_s,class
//   locks.csv     subject,epoch_s
//   ema.csv       subject,epoch_s,topic,value      (topic: stress|mood|sleep|happy|sad)
//
// Lines beginning with '#' are comments. Numbers always use '.' as the decimal
// separator.

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moodid/types.hpp"

namespace moodid {

struct DatasetManifest {
  StudyWindow window;
  std::vector<SubjectId> subjects;
  /// Per-kind file, relative to base_dir. An empty path means "no file".
  std::array<std::filesystem::path, kEventKindCount> files{};
  std::filesystem::path base_dir;
  /// Free-form provenance copied through verbatim (e.g. generator settings).
  std::map<std::string, std::string> metadata;

  std::filesystem::path path_of(EventKind k) const;

  /// Throws DataError when the window is empty or subjects are duplicated.
  void validate() const;
};

/// Manifest for `base_dir` using the conventional <kind>.csv file names.
DatasetManifest make_manifest(StudyWindow window, std::vector<SubjectId> subjects,
                              std::filesystem::path base_dir);

DatasetManifest read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& manifest_path);

std::string_view csv_header(EventKind k);

/// Stable sort by (subject, time, kind). Ties keep input order.
void canonicalize(std::vector<TelemetryEvent>& events);

/// Parses and validates every file. The result is canonical. Throws ParseError
/// for malformed rows and ValidationError (with file:line for every problem)
/// for rows that parse but violate an event invariant.
std::vector<TelemetryEvent> load_dataset(const DatasetManifest& manifest);

/// Writes each kind's rows in the order they appear in `events`.
/// load_dataset(write_dataset(x)) == x whenever x is canonical.
void write_dataset(std::span<const TelemetryEvent> events, const DatasetManifest& manifest);

/// Content hash of the manifest's window/subjects and every referenced file.
std::string dataset_hash(const DatasetManifest& manifest);

/// Accepts YYYY-MM-DD, YYYY-MM-DDTHH:MM:SS with optional Z or +HH:MM offset.
EpochSeconds parse_iso8601(std::string_view text);
/// Always emits YYYY-MM-DDTHH:MM:SSZ.
std::string format_iso8601(EpochSeconds t);

}  // namespace moodid
