#pragma once

// Domain types shared by every stage of the pipeline. Values only; nothing
// here performs I/O.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace moodid {

using EpochSeconds = std::int64_t;

inline constexpr EpochSeconds kSecondsPerHour = 3600;
inline constexpr EpochSeconds kSecondsPerDay = 86400;

struct SubjectId {
  std::uint32_t value = 0;

  friend auto operator<=>(const SubjectId&, const SubjectId&) = default;
};

/// One cell of the dense subject x hour grid. Natural ordering is
/// (subject, hour); feature-matrix rows use hour_major_less.
struct HourKey {
  SubjectId subject;
  std::int64_t hour_index = 0;

  friend auto operator<=>(const HourKey&, const HourKey&) = default;
};

inline bool hour_major_less(const HourKey& a, const HourKey& b) {
  if (a.hour_index != b.hour_index) return a.hour_index < b.hour_index;
  return a.subject < b.subject;
}

/// Half-open study window [start, end) in UTC epoch seconds.
struct StudyWindow {
  EpochSeconds start = 0;
  EpochSeconds end = 0;

  bool contains(EpochSeconds t) const { return t >= start && t < end; }

  /// Number of hour buckets; a trailing partial hour still gets a bucket.
  std::int64_t grid_length() const {
    return end > start ? (end - start + kSecondsPerHour - 1) / kSecondsPerHour : 0;
  }

  /// Hour bucket of t relative to start. Only meaningful when contains(t).
  std::int64_t hour_of(EpochSeconds t) const { return (t - start) / kSecondsPerHour; }

  /// UTC calendar day (days since 1970-01-01) containing the start of hour h.
  std::int64_t utc_day_of_hour(std::int64_t h) const {
    const EpochSeconds t = start + h * kSecondsPerHour;
    return t >= 0 ? t / kSecondsPerDay : -((-t + kSecondsPerDay - 1) / kSecondsPerDay);
  }

  friend bool operator==(const StudyWindow&, const StudyWindow&) = default;
};

enum class EmaTopic : std::uint8_t { Stress, CurrentMood, SleepQuality, Happiness, Sadness };

inline constexpr std::size_t kEmaTopicCount = 5;
inline constexpr std::array<EmaTopic, kEmaTopicCount> kEmaTopics = {
    EmaTopic::Stress, EmaTopic::CurrentMood, EmaTopic::SleepQuality, EmaTopic::Happiness,
    EmaTopic::Sadness};

struct TopicRange {
  double lo;
  double hi;
};

/// Valid response scale for each topic.
constexpr TopicRange topic_range(EmaTopic t) {
  switch (t) {
    case EmaTopic::Stress: return {1, 5};
    case EmaTopic::CurrentMood: return {1, 3};
    case EmaTopic::SleepQuality: return {1, 4};
    case EmaTopic::Happiness: return {1, 4};
    case EmaTopic::Sadness: return {1, 4};
  }
  return {0, 0};
}

constexpr std::size_t topic_index(EmaTopic t) { return static_cast<std::size_t>(t); }

/// Lowercase file keyword: stress|mood|sleep|happy|sad.
std::string_view topic_keyword(EmaTopic t);
std::optional<EmaTopic> parse_topic(std::string_view keyword);

/// Partial map topic -> value, indexed by topic_index.
using EmaValues = std::array<std::optional<double>, kEmaTopicCount>;

// Raw telemetry. Class codes for audio: 0 silence, 1 voice, 2 noise, 3 unknown;
// activity: 0 stationary, 1 walking, 2 running, 3 unknown.

struct Call {
  SubjectId subject;
  EpochSeconds start_time = 0;
  double duration_min = 0.0;
  friend bool operator==(const Call&, const Call&) = default;
};

struct AppTask {
  SubjectId subject;
  EpochSeconds time = 0;
  std::string task_id;
  friend bool operator==(const AppTask&, const AppTask&) = default;
};

struct GpsFix {
  SubjectId subject;
  EpochSeconds time = 0;
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GpsFix&, const GpsFix&) = default;
};

struct AudioInf {
  SubjectId subject;
  EpochSeconds time = 0;
  int cls = 0;
  friend bool operator==(const AudioInf&, const AudioInf&) = default;
};

struct ActivityInf {
  SubjectId subject;
  EpochSeconds time = 0;
  int cls = 0;
  friend bool operator==(const ActivityInf&, const ActivityInf&) = default;
};

struct LockEvent {
  SubjectId subject;
  EpochSeconds time = 0;
  friend bool operator==(const LockEvent&, const LockEvent&) = default;
};

struct EmaResponse {
  SubjectId subject;
  EpochSeconds time = 0;
  EmaTopic topic = EmaTopic::Stress;
  double value = 0.0;
  friend bool operator==(const EmaResponse&, const EmaResponse&) = default;
};

/// Alternative order matches EventKind.
using TelemetryEvent =
    std::variant<Call, AppTask, GpsFix, AudioInf, ActivityInf, LockEvent, EmaResponse>;

enum class EventKind : std::uint8_t { Call, App, Gps, Audio, Activity, Lock, Ema };

inline constexpr std::size_t kEventKindCount = 7;
inline constexpr std::array<EventKind, kEventKindCount> kEventKinds = {
    EventKind::Call,     EventKind::App,  EventKind::Gps, EventKind::Audio,
    EventKind::Activity, EventKind::Lock, EventKind::Ema};

inline EventKind kind_of(const TelemetryEvent& e) { return static_cast<EventKind>(e.index()); }

/// Manifest/file keyword: calls|apps|gps|audio|activity|locks|ema.
std::string_view kind_keyword(EventKind k);
std::optional<EventKind> parse_kind(std::string_view keyword);

SubjectId subject_of(const TelemetryEvent& e);
/// Event timestamp; calls are timed by their start.
EpochSeconds time_of(const TelemetryEvent& e);

/// Every violated invariant of `e` against `window`; empty when valid.
std::vector<std::string> validate_event(const TelemetryEvent& e, const StudyWindow& window);

/// Feature components of one subject-hour before vocabulary encoding.
struct HourSample {
  HourKey key;
  double call_minutes = 0.0;
  std::string app_token;
  std::string gps_token;
  int audio_code = -1;
  int activity_code = -1;
  int lock_count = 0;
  EmaValues ema{};
};

enum class Mood : std::uint8_t { Happy, Upset, Stressed };

inline constexpr std::array<Mood, 3> kMoods = {Mood::Happy, Mood::Upset, Mood::Stressed};

std::string_view mood_keyword(Mood m);  // happy|upset|stressed
std::optional<Mood> parse_mood(std::string_view keyword);

/// Independent flags; several may hold for the same sample.
struct MoodLabels {
  bool happy = false;
  bool upset = false;
  bool stressed = false;

  bool get(Mood m) const {
    switch (m) {
      case Mood::Happy: return happy;
      case Mood::Upset: return upset;
      case Mood::Stressed: return stressed;
    }
    return false;
  }

  friend bool operator==(const MoodLabels&, const MoodLabels&) = default;
};

enum class DatasetVariant : std::uint8_t { Raw, H, D };

std::string_view variant_keyword(DatasetVariant v);  // raw|H|D
std::optional<DatasetVariant> parse_variant(std::string_view keyword);

}  // namespace moodid
