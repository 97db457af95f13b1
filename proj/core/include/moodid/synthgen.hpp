#pragma once

// Seeded generator of synthetic telemetry and EMA streams with a known mood
// schedule. Each subject draws from its own derived seed, so output does not
// depend on how subjects are processed.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "moodid/ingest.hpp"
#include "moodid/types.hpp"

namespace moodid {

/// A set of task ids opened together within one hour. An empty set means the
/// phone was not used for apps that hour.
struct AppSet {
  std::vector<std::string> tasks;
  double weight = 1.0;
};

struct Place {
  double lat = 0.0;
  double lon = 0.0;
  double weight = 1.0;
};

/// Behavior changes while a mood is active. Identity by default.
struct MoodShift {
  double lock_factor = 1.0;
  double call_factor = 1.0;
  /// Probability per mood hour that the app draw comes from `app_sets`.
  double app_prob = 0.0;
  std::vector<AppSet> app_sets;
};

struct SubjectProfile {
  SubjectId id;
  std::vector<AppSet> app_sets;
  std::vector<Place> places;
  double gps_jitter_deg = 0.02;
  double gps_fix_rate = 2.0;
  /// Chance per hour of one fix far from every place.
  double stray_fix_prob = 0.0;
  double lock_rate = 2.0;
  double call_prob = 0.1;
  double call_log_mean = 1.0;
  double call_log_sd = 0.8;
  std::array<double, 4> audio_probs{0.4, 0.3, 0.2, 0.1};
  double audio_rate = 3.0;
  std::array<double, 4> activity_probs{0.6, 0.2, 0.1, 0.1};
  double activity_rate = 3.0;
  /// Per-day probability of an episode, indexed like kMoods.
  std::array<double, 3> mood_day_prob{};
  /// Episodes start at or after this hour of day and end by midnight.
  int episode_earliest_hour = 8;
  int episode_min_hours = 2;
  int episode_max_hours = 6;
  std::array<MoodShift, 3> shifts{};
  /// Probability that a day has any EMA prompts, then per-hour prompt rate.
  double ema_day_prob = 1.0;
  double ema_rate = 0.1;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct MoodTruth {
  SubjectId subject;
  std::int64_t hour_index = 0;
  Mood mood = Mood::Happy;

  friend auto operator<=>(const MoodTruth&, const MoodTruth&) = default;
};

struct SynthOutput {
  StudyWindow window;
  std::vector<SubjectId> subjects;
  /// Canonical order; includes the EMA responses.
  std::vector<TelemetryEvent> events;
  /// Ordered by (subject, hour, mood).
  std::vector<MoodTruth> truth;
  /// Subject-days that received an episode, per mood.
  std::array<std::size_t, 3> episode_days{};
};

inline constexpr EpochSeconds kDefaultSynthStart = 1364169600;  // 2013-03-25T00:00:00Z

/// Needs at least two profiles with distinct ids and days >= 2.
SynthOutput generate(const std::vector<SubjectProfile>& profiles, int days, std::uint64_t seed,
                     EpochSeconds start = kDefaultSynthStart);

struct Scenario {
  std::string name;
  std::vector<SubjectProfile> profiles;
  int days = 0;
};

std::vector<std::string> scenario_names();
/// `subjects`/`days` of 0 keep the scenario defaults. Throws
/// std::invalid_argument for an unknown name, listing the valid ones.
Scenario make_scenario(std::string_view name, std::uint64_t seed, int subjects = 0, int days = 0);

/// Writes manifest.json, one CSV per event kind and ground_truth.csv.
DatasetManifest write_synth(const SynthOutput& out, const std::filesystem::path& dir,
                            const std::map<std::string, std::string>& metadata = {});

std::string ground_truth_csv(const std::vector<MoodTruth>& truth);

}  // namespace moodid
