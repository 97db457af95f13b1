#pragma once

// Persistence for experiment results and report tables.
//
// windows CSV: one row per evaluated window, then skipped windows with empty
// metric fields and the reason in the last column.
// result JSON: config, provenance, column names, per-window records
// (including selected column indices) and aggregates.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "moodid/harness.hpp"

namespace moodid {

struct ResultFile {
  ExperimentResult result;
  /// Free-form string pairs such as dataset and feature hashes.
  std::map<std::string, std::string> provenance;
};

std::string window_csv(const ExperimentResult& result);
void write_window_csv(const std::filesystem::path& path, const ExperimentResult& result);

std::string result_json(const ResultFile& file);
/// Throws DataError on malformed input.
ResultFile result_from_json(std::string_view json);
void write_result_json(const std::filesystem::path& path, const ResultFile& file);
ResultFile read_result_json(const std::filesystem::path& path);

/// rank,feature,count,frequency
std::string saliency_csv(std::span<const SaliencyEntry> entries);
/// Square matrix with a leading name column; undefined entries are "NA".
std::string correlation_csv(const CorrelationMatrix& m);

}  // namespace moodid
