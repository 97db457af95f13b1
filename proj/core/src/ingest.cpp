#include "moodid/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

#include "csv_util.hpp"
#include "json.hpp"
#include "moodid/errors.hpp"
#include "moodid/hash.hpp"

namespace moodid {

namespace fs = std::filesystem;
using detail::format_double;
using detail::parse_double;
using detail::parse_i64;

namespace {

int parse_fixed(std::string_view s, std::size_t pos, std::size_t len, std::string_view text) {
  if (pos + len > s.size()) throw DataError("bad timestamp: " + std::string(text));
  auto v = parse_i64(s.substr(pos, len));
  if (!v || *v < 0) throw DataError("bad timestamp: " + std::string(text));
  return static_cast<int>(*v);
}

std::string row_error(EventKind k, std::size_t fields) {
  return "expected " +
         std::to_string(detail::split_fields(csv_header(k)).size()) + " columns for " +
         std::string(kind_keyword(k)) + ", got " + std::to_string(fields);
}

SubjectId parse_subject(std::string_view s, const detail::LineReader& r) {
  auto v = parse_i64(s);
  if (!v || *v < 0 || *v > std::numeric_limits<std::uint32_t>::max()) {
    throw ParseError(r.name(), r.line_number(), "bad subject id '" + std::string(s) + "'");
  }
  return SubjectId{static_cast<std::uint32_t>(*v)};
}

EpochSeconds parse_time(std::string_view s, const detail::LineReader& r) {
  auto v = parse_i64(s);
  if (!v) throw ParseError(r.name(), r.line_number(), "bad epoch seconds '" + std::string(s) + "'");
  return *v;
}

double parse_real(std::string_view s, const detail::LineReader& r, const char* what) {
  auto v = parse_double(s);
  if (!v) {
    throw ParseError(r.name(), r.line_number(), std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return *v;
}

int parse_class(std::string_view s, const detail::LineReader& r) {
  auto v = parse_i64(s);
  if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
    throw ParseError(r.name(), r.line_number(), "bad class code '" + std::string(s) + "'");
  }
  return static_cast<int>(*v);
}

TelemetryEvent parse_row(EventKind k, const std::vector<std::string_view>& f,
                         const detail::LineReader& r) {
  const SubjectId subject = parse_subject(f[0], r);
  const EpochSeconds t = parse_time(f[1], r);
  switch (k) {
    case EventKind::Call: return Call{subject, t, parse_real(f[2], r, "duration")};
    case EventKind::App: return AppTask{subject, t, std::string(f[2])};
    case EventKind::Gps: return GpsFix{subject, t, parse_real(f[2], r, "latitude"), parse_real(f[3], r, "longitude")};
    case EventKind::Audio: return AudioInf{subject, t, parse_class(f[2], r)};
    case EventKind::Activity: return ActivityInf{subject, t, parse_class(f[2], r)};
    case EventKind::Lock: return LockEvent{subject, t};
    case EventKind::Ema: {
      auto topic = parse_topic(f[2]);
      if (!topic) throw ParseError(r.name(), r.line_number(), "unknown EMA topic '" + std::string(f[2]) + "'");
      return EmaResponse{subject, t, *topic, parse_real(f[3], r, "EMA value")};
    }
  }
  throw ParseError(r.name(), r.line_number(), "unknown event kind");
}

void append_row(std::string& out, const TelemetryEvent& e) {
  const auto subject = std::to_string(subject_of(e).value);
  const auto t = std::to_string(time_of(e));
  out += subject;
  out += ',';
  out += t;
  std::visit(
      [&](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, Call>) {
          out += ',' + format_double(ev.duration_min);
        } else if constexpr (std::is_same_v<T, AppTask>) {
          out += ',' + ev.task_id;
        } else if constexpr (std::is_same_v<T, GpsFix>) {
          out += ',' + format_double(ev.lat) + ',' + format_double(ev.lon);
        } else if constexpr (std::is_same_v<T, AudioInf> || std::is_same_v<T, ActivityInf>) {
          out += ',' + std::to_string(ev.cls);
        } else if constexpr (std::is_same_v<T, EmaResponse>) {
          out += ',';
          out += topic_keyword(ev.topic);
          out += ',' + format_double(ev.value);
        }
      },
      e);
  out += '\n';
}

}  // namespace

fs::path DatasetManifest::path_of(EventKind k) const {
  const auto& rel = files[static_cast<std::size_t>(k)];
  if (rel.empty()) return {};
  return base_dir / rel;
}

void DatasetManifest::validate() const {
  if (window.end <= window.start) throw DataError("manifest: study_end must be after study_start");
  std::set<SubjectId> seen;
  for (SubjectId s : subjects) {
    if (!seen.insert(s).second) {
      throw DataError("manifest: duplicate subject " + std::to_string(s.value));
    }
  }
}

DatasetManifest make_manifest(StudyWindow window, std::vector<SubjectId> subjects, fs::path base_dir) {
  DatasetManifest m;
  m.window = window;
  m.subjects = std::move(subjects);
  m.base_dir = std::move(base_dir);
  for (EventKind k : kEventKinds) {
    m.files[static_cast<std::size_t>(k)] = std::string(kind_keyword(k)) + ".csv";
  }
  return m;
}

std::string_view csv_header(EventKind k) {
  switch (k) {
    case EventKind::Call: return "subject,start_epoch_s,duration_min";
    case EventKind::App: return "subject,epoch_s,task_id";
    case EventKind::Gps: return "subject,epoch_s,lat,lon";
    case EventKind::Audio: return "subject,epoch_s,class";
    case EventKind::Activity: return "subject,epoch_s,class";
    case EventKind::Lock: return "subject,epoch_s";
    case EventKind::Ema: return "subject,epoch_s,topic,value";
  }
  return "";
}

EpochSeconds parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  std::string_view s = text;
  const int y = parse_fixed(s, 0, 4, text);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') throw DataError("bad timestamp: " + std::string(text));
  const int mo = parse_fixed(s, 5, 2, text);
  const int d = parse_fixed(s, 8, 2, text);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw DataError("bad calendar date: " + std::string(text));
  EpochSeconds t = duration_cast<seconds>(sys_days{ymd}.time_since_epoch()).count();
  if (s.size() == 10) return t;
  if (s.size() < 19 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') {
    throw DataError("bad timestamp: " + std::string(text));
  }
  const int hh = parse_fixed(s, 11, 2, text);
  const int mm = parse_fixed(s, 14, 2, text);
  const int ss = parse_fixed(s, 17, 2, text);
  if (hh > 23 || mm > 59 || ss > 59) throw DataError("bad time of day: " + std::string(text));
  t += hh * 3600 + mm * 60 + ss;
  std::string_view zone = s.substr(19);
  if (zone.empty() || zone == "Z") return t;
  if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':') {
    const int oh = parse_fixed(zone, 1, 2, text);
    const int om = parse_fixed(zone, 4, 2, text);
    const EpochSeconds offset = oh * 3600 + om * 60;
    return zone[0] == '+' ? t - offset : t + offset;
  }
  throw DataError("bad UTC offset: " + std::string(text));
}

std::string format_iso8601(EpochSeconds t) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{t}};
  const auto dp = floor<days>(tp);
  const year_month_day ymd{dp};
  const hh_mm_ss hms{tp - dp};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

DatasetManifest read_manifest(const fs::path& manifest_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest " + manifest_path.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.base_dir = manifest_path.parent_path();
  try {
    m.window.start = parse_iso8601(j.at("study_start").get<std::string>());
    m.window.end = parse_iso8601(j.at("study_end").get<std::string>());
    for (const auto& s : j.at("subjects")) m.subjects.push_back(SubjectId{s.get<std::uint32_t>()});
    const auto& files = j.at("files");
    for (auto it = files.begin(); it != files.end(); ++it) {
      auto kind = parse_kind(it.key());
      if (!kind) throw DataError("manifest: unknown event kind '" + it.key() + "'");
      m.files[static_cast<std::size_t>(*kind)] = it.value().get<std::string>();
    }
    if (j.contains("metadata")) {
      for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it) {
        m.metadata[it.key()] = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest " + manifest_path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& manifest_path) {
  nlohmann::ordered_json j;
  j["format"] = "moodid-dataset/1";
  j["study_start"] = format_iso8601(manifest.window.start);
  j["study_end"] = format_iso8601(manifest.window.end);
  auto subjects = nlohmann::ordered_json::array();
  for (SubjectId s : manifest.subjects) subjects.push_back(s.value);
  j["subjects"] = subjects;
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (EventKind k : kEventKinds) {
    const auto& rel = manifest.files[static_cast<std::size_t>(k)];
    if (!rel.empty()) files[std::string(kind_keyword(k))] = rel.generic_string();
  }
  j["files"] = files;
  if (!manifest.metadata.empty()) j["metadata"] = manifest.metadata;
  if (manifest_path.has_parent_path()) fs::create_directories(manifest_path.parent_path());
  detail::write_file(manifest_path, j.dump(2) + "\n");
}

void canonicalize(std::vector<TelemetryEvent>& events) {
  std::stable_sort(events.begin(), events.end(), [](const TelemetryEvent& a, const TelemetryEvent& b) {
    const auto sa = subject_of(a), sb = subject_of(b);
    if (sa != sb) return sa < sb;
    const auto ta = time_of(a), tb = time_of(b);
    if (ta != tb) return ta < tb;
    return a.index() < b.index();
  });
}

std::vector<TelemetryEvent> load_dataset(const DatasetManifest& manifest) {
  manifest.validate();
  const std::set<SubjectId> known(manifest.subjects.begin(), manifest.subjects.end());
  std::vector<TelemetryEvent> events;
  std::vector<std::string> problems;

  for (EventKind k : kEventKinds) {
    const fs::path path = manifest.path_of(k);
    if (path.empty()) continue;
    detail::LineReader reader(path);
    const std::size_t columns = detail::split_fields(csv_header(k)).size();
    bool have_header = false;
    std::string line;
    while (reader.next(line)) {
      if (line.empty() || line.front() == '#') continue;
      if (!have_header) {
        if (line != csv_header(k)) {
          throw ParseError(reader.name(), reader.line_number(),
                           "expected header '" + std::string(csv_header(k)) + "'");
        }
        have_header = true;
        continue;
      }
      const auto fields = detail::split_fields(line);
      if (fields.size() != columns) {
        throw ParseError(reader.name(), reader.line_number(), row_error(k, fields.size()));
      }
      TelemetryEvent e = parse_row(k, fields, reader);
      auto violations = validate_event(e, manifest.window);
      if (!known.contains(subject_of(e))) {
        violations.push_back("subject " + std::to_string(subject_of(e).value) + " not listed in manifest");
      }
      for (auto& v : violations) {
        problems.push_back(reader.name() + ":" + std::to_string(reader.line_number()) + ": " + v);
      }
      events.push_back(std::move(e));
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  canonicalize(events);
  return events;
}

void write_dataset(std::span<const TelemetryEvent> events, const DatasetManifest& manifest) {
  std::array<std::string, kEventKindCount> bodies;
  for (EventKind k : kEventKinds) {
    auto& body = bodies[static_cast<std::size_t>(k)];
    body = std::string(csv_header(k)) + "\n";
  }
  for (const auto& e : events) append_row(bodies[e.index()], e);
  if (!manifest.base_dir.empty()) fs::create_directories(manifest.base_dir);
  for (EventKind k : kEventKinds) {
    const fs::path path = manifest.path_of(k);
    const auto& body = bodies[static_cast<std::size_t>(k)];
    if (path.empty()) {
      if (body.find('\n') + 1 != body.size()) {
        throw DataError("manifest has no file for " + std::string(kind_keyword(k)) + " events");
      }
      continue;
    }
    detail::write_file(path, body);
  }
}

std::string dataset_hash(const DatasetManifest& manifest) {
  Fnv1a h;
  h.update(std::to_string(manifest.window.start)).update("|").update(std::to_string(manifest.window.end));
  for (SubjectId s : manifest.subjects) h.update("|s").update(std::to_string(s.value));
  for (EventKind k : kEventKinds) {
    const fs::path path = manifest.path_of(k);
    h.update("|").update(kind_keyword(k)).update("=");
    if (!path.empty()) h.update(detail::read_file(path));
  }
  return h.hex();
}

}  // namespace moodid
