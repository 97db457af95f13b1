#include "moodid/types.hpp"

#include <cmath>

namespace moodid {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_class(int cls, std::vector<std::string>& out) {
  if (cls < 0 || cls > 3) out.push_back("class out of range: " + std::to_string(cls) + " not in {0,1,2,3}");
}

// Task ids end up inside space-joined set tokens and comma-separated files.
void check_task_id(const std::string& id, std::vector<std::string>& out) {
  if (id.empty()) {
    out.emplace_back("empty task_id");
    return;
  }
  for (unsigned char c : id) {
    if (c <= 0x20 || c == 0x7f || c == ',' || c == '"') {
      out.push_back("task_id contains a separator or control character: '" + id + "'");
      return;
    }
  }
}

}  // namespace

std::string_view topic_keyword(EmaTopic t) {
  switch (t) {
    case EmaTopic::Stress: return "stress";
    case EmaTopic::CurrentMood: return "mood";
    case EmaTopic::SleepQuality: return "sleep";
    case EmaTopic::Happiness: return "happy";
    case EmaTopic::Sadness: return "sad";
  }
  return "?";
}

std::optional<EmaTopic> parse_topic(std::string_view keyword) {
  for (EmaTopic t : kEmaTopics) {
    if (topic_keyword(t) == keyword) return t;
  }
  return std::nullopt;
}

std::string_view kind_keyword(EventKind k) {
  switch (k) {
    case EventKind::Call: return "calls";
    case EventKind::App: return "apps";
    case EventKind::Gps: return "gps";
    case EventKind::Audio: return "audio";
    case EventKind::Activity: return "activity";
    case EventKind::Lock: return "locks";
    case EventKind::Ema: return "ema";
  }
  return "?";
}

std::optional<EventKind> parse_kind(std::string_view keyword) {
  for (EventKind k : kEventKinds) {
    if (kind_keyword(k) == keyword) return k;
  }
  return std::nullopt;
}

std::string_view mood_keyword(Mood m) {
  switch (m) {
    case Mood::Happy: return "happy";
    case Mood::Upset: return "upset";
    case Mood::Stressed: return "stressed";
  }
  return "?";
}

std::optional<Mood> parse_mood(std::string_view keyword) {
  for (Mood m : kMoods) {
    if (mood_keyword(m) == keyword) return m;
  }
  return std::nullopt;
}

std::string_view variant_keyword(DatasetVariant v) {
  switch (v) {
    case DatasetVariant::Raw: return "raw";
    case DatasetVariant::H: return "H";
    case DatasetVariant::D: return "D";
  }
  return "?";
}

std::optional<DatasetVariant> parse_variant(std::string_view keyword) {
  if (keyword == "raw" || keyword == "Raw") return DatasetVariant::Raw;
  if (keyword == "H" || keyword == "h") return DatasetVariant::H;
  if (keyword == "D" || keyword == "d") return DatasetVariant::D;
  return std::nullopt;
}

SubjectId subject_of(const TelemetryEvent& e) {
  return std::visit([](const auto& ev) { return ev.subject; }, e);
}

EpochSeconds time_of(const TelemetryEvent& e) {
  return std::visit(overloaded{[](const Call& c) { return c.start_time; },
                               [](const auto& ev) { return ev.time; }},
                    e);
}

std::vector<std::string> validate_event(const TelemetryEvent& e, const StudyWindow& window) {
  std::vector<std::string> out;
  const EpochSeconds t = time_of(e);
  if (!window.contains(t)) {
    out.push_back("timestamp " + std::to_string(t) + " outside study window [" +
                  std::to_string(window.start) + ", " + std::to_string(window.end) + ")");
  }
  std::visit(
      overloaded{
          [&](const Call& c) {
            if (!std::isfinite(c.duration_min) || c.duration_min < 0.0) {
              out.emplace_back("negative or non-finite call duration");
            }
          },
          [&](const AppTask& a) { check_task_id(a.task_id, out); },
          [&](const GpsFix& g) {
            if (!(g.lat >= -90.0 && g.lat <= 90.0)) out.emplace_back("latitude out of range [-90, 90]");
            if (!(g.lon >= -180.0 && g.lon <= 180.0)) out.emplace_back("longitude out of range [-180, 180]");
          },
          [&](const AudioInf& a) { check_class(a.cls, out); },
          [&](const ActivityInf& a) { check_class(a.cls, out); },
          [](const LockEvent&) {},
          [&](const EmaResponse& r) {
            const auto range = topic_range(r.topic);
            if (!(r.value >= range.lo && r.value <= range.hi)) {
              out.push_back(std::string("EMA value out of range for topic ") +
                            std::string(topic_keyword(r.topic)));
            }
          },
      },
      e);
  return out;
}

}  // namespace moodid
