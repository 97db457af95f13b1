#include "moodid/featurize.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "csv_util.hpp"
#include "moodid/errors.hpp"
#include "moodid/mood.hpp"

namespace moodid {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ' ';
    out += parts[i];
  }
  return out;
}

}  // namespace

double call_feature(std::span<const double> durations) {
  double total = 0.0;
  for (double d : durations) total += d;
  return total;
}

int mode_code(std::span<const int> classes) {
  if (classes.empty()) return -1;
  std::array<int, 4> counts{};
  for (int c : classes) {
    if (c < 0 || c > 3) throw std::invalid_argument("mode_code: class out of range");
    ++counts[static_cast<std::size_t>(c)];
  }
  const int best = *std::max_element(counts.begin(), counts.end());
  int mode = -1;
  for (int c = 0; c < 4; ++c) {
    if (counts[static_cast<std::size_t>(c)] != best) continue;
    if (mode != -1) return 4;
    mode = c;
  }
  return mode;
}

std::string app_token(std::span<const std::string> task_ids) {
  std::vector<std::string> ids(task_ids.begin(), task_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return join(ids);
}

std::string gps_token(std::span<const int> labels) {
  std::vector<int> ids(labels.begin(), labels.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<std::string> parts;
  parts.reserve(ids.size());
  for (int id : ids) parts.push_back(id == kNoise ? std::string(kNoiseSymbol) : std::to_string(id));
  return join(parts);
}

bool HourEvents::empty() const {
  return call_durations.empty() && app_ids.empty() && gps_fixes.empty() && audio.empty() &&
         activity.empty() && locks == 0 && ema.empty();
}

HourBuckets::HourBuckets(std::vector<SubjectId> subjects, std::int64_t grid_length)
    : subjects_(std::move(subjects)), grid_length_(grid_length) {
  std::sort(subjects_.begin(), subjects_.end());
  for (std::size_t i = 0; i < subjects_.size(); ++i) {
    if (!position_.emplace(subjects_[i], i).second) {
      throw DataError("duplicate subject " + std::to_string(subjects_[i].value));
    }
  }
  if (grid_length_ < 0) throw DataError("negative grid length");
  cells_.resize(subjects_.size() * static_cast<std::size_t>(grid_length_));
}

std::size_t HourBuckets::subject_position(SubjectId s) const {
  auto it = position_.find(s);
  if (it == position_.end()) throw DataError("unknown subject " + std::to_string(s.value));
  return it->second;
}

HourEvents& HourBuckets::at(std::size_t subject_pos, std::int64_t hour) {
  return cells_[subject_pos * static_cast<std::size_t>(grid_length_) + static_cast<std::size_t>(hour)];
}

const HourEvents& HourBuckets::at(std::size_t subject_pos, std::int64_t hour) const {
  return cells_[subject_pos * static_cast<std::size_t>(grid_length_) + static_cast<std::size_t>(hour)];
}

const HourEvents& HourBuckets::at(const HourKey& key) const {
  return at(subject_position(key.subject), key.hour_index);
}

HourBuckets bucket_hours(std::span<const TelemetryEvent> events, const StudyWindow& window,
                         std::span<const SubjectId> subjects) {
  HourBuckets buckets(std::vector<SubjectId>(subjects.begin(), subjects.end()), window.grid_length());
  for (const auto& e : events) {
    const EpochSeconds t = time_of(e);
    if (!window.contains(t)) {
      throw DataError("event at " + std::to_string(t) + " lies outside the study window");
    }
    HourEvents& cell = buckets.at(buckets.subject_position(subject_of(e)), window.hour_of(t));
    std::visit(overloaded{
                   [&](const Call& c) { cell.call_durations.push_back(c.duration_min); },
                   [&](const AppTask& a) { cell.app_ids.push_back(a.task_id); },
                   [&](const GpsFix& g) {
                     cell.gps_fixes.push_back(buckets.gps_points().size());
                     buckets.gps_points().push_back(GeoPoint{g.lat, g.lon});
                   },
                   [&](const AudioInf& a) { cell.audio.push_back(a.cls); },
                   [&](const ActivityInf& a) { cell.activity.push_back(a.cls); },
                   [&](const LockEvent&) { ++cell.locks; },
                   [&](const EmaResponse& r) { cell.ema.push_back(r); },
               },
               e);
  }
  return buckets;
}

TokenVocabulary::TokenVocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

bool TokenVocabulary::contains(std::string_view token) const { return index_.find(token) != index_.end(); }

std::size_t TokenVocabulary::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw DataError("token '" + std::string(token) + "' missing from vocabulary");
  return it->second;
}

std::vector<HourSample> extract_samples(const HourBuckets& buckets, std::span<const int> gps_labels) {
  if (gps_labels.size() != buckets.gps_points().size()) {
    throw std::invalid_argument("extract_samples: one GPS label per fix required");
  }
  std::vector<HourSample> samples;
  samples.reserve(buckets.size());
  std::vector<int> labels;
  for (std::int64_t h = 0; h < buckets.grid_length(); ++h) {
    for (std::size_t s = 0; s < buckets.subjects().size(); ++s) {
      const HourEvents& cell = buckets.at(s, h);
      HourSample sample;
      sample.key = HourKey{buckets.subjects()[s], h};
      sample.call_minutes = call_feature(cell.call_durations);
      sample.app_token = app_token(cell.app_ids);
      labels.clear();
      for (std::size_t fix : cell.gps_fixes) labels.push_back(gps_labels[fix]);
      sample.gps_token = gps_token(labels);
      sample.audio_code = mode_code(cell.audio);
      sample.activity_code = mode_code(cell.activity);
      sample.lock_count = cell.locks;
      sample.ema = values_of(mean_by_topic(cell.ema));
      samples.push_back(std::move(sample));
    }
  }
  return samples;
}

FeatureMatrix build_matrix(std::span<const HourSample> samples, const TokenVocabulary& apps,
                           const TokenVocabulary& gps) {
  FeatureMatrix m;
  m.columns.reserve(apps.size() + gps.size() + kScalarFeatureCount);
  for (const auto& t : apps.tokens()) m.columns.push_back("apps_" + t);
  for (const auto& t : gps.tokens()) m.columns.push_back("gps_" + t);
  for (const char* name : {"call", "audio", "activity", "lock"}) m.columns.emplace_back(name);

  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return hour_major_less(samples[a].key, samples[b].key);
  });

  const std::size_t cols = m.columns.size();
  const std::size_t scalar = apps.size() + gps.size();
  m.rows.reserve(samples.size());
  m.values.assign(samples.size() * cols, 0.0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const HourSample& s = samples[order[r]];
    m.rows.push_back(s.key);
    double* row = m.values.data() + r * cols;
    row[apps.index_of(s.app_token)] = 1.0;
    row[apps.size() + gps.index_of(s.gps_token)] = 1.0;
    row[scalar + 0] = s.call_minutes;
    row[scalar + 1] = s.audio_code;
    row[scalar + 2] = s.activity_code;
    row[scalar + 3] = s.lock_count;
  }
  return m;
}

Featurized featurize(std::span<const TelemetryEvent> events, const StudyWindow& window,
                     std::span<const SubjectId> subjects, const FeaturizeOptions& options) {
  const HourBuckets buckets = bucket_hours(events, window, subjects);
  const std::vector<int> labels = dbscan(buckets.gps_points(), options.dbscan);

  Featurized out;
  out.gps_fixes = labels.size();
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  out.gps_clusters = static_cast<std::size_t>(max_label + 1);

  out.samples = extract_samples(buckets, labels);
  std::vector<std::string> app_tokens, gps_tokens;
  app_tokens.reserve(out.samples.size());
  gps_tokens.reserve(out.samples.size());
  for (const auto& s : out.samples) {
    app_tokens.push_back(s.app_token);
    gps_tokens.push_back(s.gps_token);
  }
  out.app_vocab = TokenVocabulary(std::move(app_tokens));
  out.gps_vocab = TokenVocabulary(std::move(gps_tokens));
  out.matrix = build_matrix(out.samples, out.app_vocab, out.gps_vocab);
  return out;
}

void write_feature_csv(const FeatureMatrix& m, const std::filesystem::path& path,
                       const std::map<std::string, std::string>& tags) {
  std::string out = detail::format_tags(tags);
  out += "subject,hour_index";
  for (const auto& c : m.columns) {
    if (c.find(',') != std::string::npos || c.find('\n') != std::string::npos) {
      throw DataError("column name cannot be written to CSV: '" + c + "'");
    }
    out += ',';
    out += c;
  }
  out += '\n';
  for (std::size_t r = 0; r < m.row_count(); ++r) {
    out += std::to_string(m.rows[r].subject.value);
    out += ',';
    out += std::to_string(m.rows[r].hour_index);
    for (double v : m.row(r)) {
      out += ',';
      out += detail::format_double(v);
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path, std::map<std::string, std::string>* tags) {
  detail::LineReader reader(path);
  FeatureMatrix m;
  bool have_header = false;
  std::string line;
  auto fail = [&](const std::string& what) { throw ParseError(reader.name(), reader.line_number(), what); };
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto tag = detail::parse_tag_line(line); tag && tags) (*tags)[tag->first] = tag->second;
      continue;
    }
    const auto f = detail::split_fields(line);
    if (!have_header) {
      if (f.size() < 2 || f[0] != "subject" || f[1] != "hour_index") fail("expected 'subject,hour_index,...' header");
      for (std::size_t i = 2; i < f.size(); ++i) m.columns.emplace_back(f[i]);
      have_header = true;
      continue;
    }
    if (f.size() != m.columns.size() + 2) fail("wrong column count");
    const auto subject = detail::parse_i64(f[0]);
    const auto hour = detail::parse_i64(f[1]);
    if (!subject || *subject < 0 || !hour) fail("bad row key");
    m.rows.push_back(HourKey{SubjectId{static_cast<std::uint32_t>(*subject)}, *hour});
    for (std::size_t i = 2; i < f.size(); ++i) {
      auto v = detail::parse_double(f[i]);
      if (!v) fail("bad value '" + std::string(f[i]) + "'");
      m.values.push_back(*v);
    }
  }
  if (!have_header) fail("missing header row");
  return m;
}

}  // namespace moodid
