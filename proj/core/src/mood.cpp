#include "moodid/mood.hpp"

#include <algorithm>
#include <set>

#include "csv_util.hpp"
#include "moodid/errors.hpp"

namespace moodid {

namespace {

bool eq(const std::optional<double>& v, double x) { return v && *v == x; }
bool ge(const std::optional<double>& v, double x) { return v && *v >= x; }
bool le(const std::optional<double>& v, double x) { return v && *v <= x; }

constexpr std::string_view kLabelHeader =
    "subject,hour_index,variant,happy,upset,stressed,ema_stress,ema_mood,ema_sleep,ema_happy,ema_sad";

}  // namespace

EmaCells mean_by_topic(std::span<const EmaResponse> responses) {
  std::array<double, kEmaTopicCount> sums{};
  std::array<int, kEmaTopicCount> counts{};
  for (const auto& r : responses) {
    sums[topic_index(r.topic)] += r.value;
    ++counts[topic_index(r.topic)];
  }
  EmaCells out{};
  for (std::size_t t = 0; t < kEmaTopicCount; ++t) {
    if (counts[t] > 0) out[t] = EmaCell{sums[t] / counts[t], counts[t]};
  }
  return out;
}

EmaValues values_of(const EmaCells& cells) {
  EmaValues out{};
  for (std::size_t t = 0; t < kEmaTopicCount; ++t) {
    if (cells[t]) out[t] = cells[t]->mean;
  }
  return out;
}

bool has_any(const EmaCells& cells) {
  for (const auto& c : cells) {
    if (c) return true;
  }
  return false;
}

EmaHourly average_hourly(std::span<const EmaResponse> responses, const StudyWindow& window) {
  std::map<HourKey, std::vector<EmaResponse>> grouped;
  for (const auto& r : responses) {
    if (!window.contains(r.time)) continue;
    grouped[HourKey{r.subject, window.hour_of(r.time)}].push_back(r);
  }
  EmaHourly out;
  for (const auto& [key, rs] : grouped) out.emplace(key, mean_by_topic(rs));
  return out;
}

EmaHourly average_hourly(std::span<const TelemetryEvent> events, const StudyWindow& window) {
  std::vector<EmaResponse> responses;
  for (const auto& e : events) {
    if (const auto* r = std::get_if<EmaResponse>(&e)) responses.push_back(*r);
  }
  return average_hourly(responses, window);
}

EmaHourly propagate_hourly(const EmaHourly& raw, std::int64_t grid_length) {
  struct Acc {
    double sum = 0.0;
    int n = 0;
  };
  std::map<HourKey, std::array<Acc, kEmaTopicCount>> spill;
  for (const auto& [key, cells] : raw) {
    for (std::size_t t = 0; t < kEmaTopicCount; ++t) {
      if (!cells[t]) continue;
      for (std::int64_t h : {key.hour_index - 1, key.hour_index + 1}) {
        if (h < 0 || h >= grid_length) continue;
        const HourKey target{key.subject, h};
        auto it = raw.find(target);
        if (it != raw.end() && it->second[t]) continue;
        auto& acc = spill[target][t];
        acc.sum += cells[t]->mean;
        ++acc.n;
      }
    }
  }
  EmaHourly out = raw;
  for (const auto& [key, accs] : spill) {
    auto& cells = out[key];
    for (std::size_t t = 0; t < kEmaTopicCount; ++t) {
      if (accs[t].n > 0) cells[t] = EmaCell{accs[t].sum / accs[t].n, 0};
    }
  }
  return out;
}

EmaHourly propagate_daily(const EmaHourly& raw, const StudyWindow& window) {
  struct Acc {
    double weighted = 0.0;
    int responses = 0;
  };
  // (subject, day) -> per-topic accumulators
  std::map<std::pair<SubjectId, std::int64_t>, std::array<Acc, kEmaTopicCount>> days;
  for (const auto& [key, cells] : raw) {
    auto& accs = days[{key.subject, window.utc_day_of_hour(key.hour_index)}];
    for (std::size_t t = 0; t < kEmaTopicCount; ++t) {
      if (!cells[t]) continue;
      const int w = cells[t]->responses > 0 ? cells[t]->responses : 1;
      accs[t].weighted += cells[t]->mean * w;
      accs[t].responses += w;
    }
  }
  const std::int64_t grid = window.grid_length();
  EmaHourly out;
  for (const auto& [sd, accs] : days) {
    const auto [subject, day] = sd;
    EmaCells cells{};
    for (std::size_t t = 0; t < kEmaTopicCount; ++t) {
      if (accs[t].responses > 0) cells[t] = EmaCell{accs[t].weighted / accs[t].responses, accs[t].responses};
    }
    if (!has_any(cells)) continue;
    const EpochSeconds day_start = day * kSecondsPerDay;
    std::int64_t h = (day_start - window.start) / kSecondsPerHour - 1;
    if (h < 0) h = 0;
    for (; h < grid; ++h) {
      const std::int64_t d = window.utc_day_of_hour(h);
      if (d < day) continue;
      if (d > day) break;
      out[HourKey{subject, h}] = cells;
    }
  }
  return out;
}

EmaHourly make_variant(DatasetVariant variant, const EmaHourly& raw, const StudyWindow& window) {
  switch (variant) {
    case DatasetVariant::Raw: return raw;
    case DatasetVariant::H: return propagate_hourly(raw, window.grid_length());
    case DatasetVariant::D: return propagate_daily(raw, window);
  }
  return raw;
}

MoodLabels classify_mood(const EmaValues& ema) {
  const auto& stress = ema[topic_index(EmaTopic::Stress)];
  const auto& mood = ema[topic_index(EmaTopic::CurrentMood)];
  const auto& sleep = ema[topic_index(EmaTopic::SleepQuality)];
  const auto& happiness = ema[topic_index(EmaTopic::Happiness)];
  const auto& sadness = ema[topic_index(EmaTopic::Sadness)];

  MoodLabels out;
  out.happy = eq(sleep, 1) || ge(stress, 4) || ge(happiness, 2) || eq(mood, 1);
  out.upset = eq(stress, 3) || (eq(mood, 3) && ge(sleep, 3)) || ge(sadness, 2);
  out.stressed = ge(sleep, 3) || (ge(stress, 1) && le(stress, 3)) || eq(mood, 2);
  return out;
}

std::size_t MoodCounts::get(Mood m) const {
  switch (m) {
    case Mood::Happy: return happy;
    case Mood::Upset: return upset;
    case Mood::Stressed: return stressed;
  }
  return 0;
}

void MoodCounts::add(const MoodLabels& l) {
  happy += l.happy;
  upset += l.upset;
  stressed += l.stressed;
}

CoverageReport coverage_report(DatasetVariant variant, const EmaHourly& ema,
                               std::span<const SubjectId> subjects, std::int64_t grid_length) {
  CoverageReport r;
  r.variant = variant;
  r.total_samples = subjects.size() * static_cast<std::size_t>(grid_length > 0 ? grid_length : 0);
  const std::set<SubjectId> known(subjects.begin(), subjects.end());
  for (SubjectId s : subjects) {
    r.labeled_per_subject[s] = 0;
    r.mood_per_subject[s] = {};
  }
  for (const auto& [key, cells] : ema) {
    if (!known.contains(key.subject) || key.hour_index < 0 || key.hour_index >= grid_length) continue;
    if (!has_any(cells)) continue;
    ++r.labeled_count;
    ++r.labeled_per_subject[key.subject];
    const MoodLabels l = classify_mood(values_of(cells));
    r.mood_per_subject[key.subject].add(l);
    r.mood_totals.add(l);
  }
  r.fraction = r.total_samples ? static_cast<double>(r.labeled_count) / static_cast<double>(r.total_samples) : 0.0;
  return r;
}

LabelTable build_label_table(DatasetVariant variant, const EmaHourly& ema,
                             std::span<const SubjectId> subjects, std::int64_t grid_length) {
  LabelTable t;
  t.variant = variant;
  std::vector<SubjectId> ordered(subjects.begin(), subjects.end());
  std::sort(ordered.begin(), ordered.end());
  const std::size_t n = ordered.size() * static_cast<std::size_t>(grid_length);
  t.keys.reserve(n);
  t.labels.reserve(n);
  t.ema.reserve(n);
  for (SubjectId s : ordered) {
    for (std::int64_t h = 0; h < grid_length; ++h) {
      const HourKey key{s, h};
      EmaValues values{};
      if (auto it = ema.find(key); it != ema.end()) values = values_of(it->second);
      t.keys.push_back(key);
      t.ema.push_back(values);
      t.labels.push_back(classify_mood(values));
    }
  }
  return t;
}

EmaHourly ema_of(const LabelTable& table) {
  EmaHourly out;
  for (std::size_t i = 0; i < table.keys.size(); ++i) {
    EmaCells cells{};
    bool any = false;
    for (std::size_t t = 0; t < kEmaTopicCount; ++t) {
      if (table.ema[i][t]) {
        cells[t] = EmaCell{*table.ema[i][t], 0};
        any = true;
      }
    }
    if (any) out.emplace(table.keys[i], cells);
  }
  return out;
}

void write_label_csv(const LabelTable& table, const std::filesystem::path& path,
                     const std::map<std::string, std::string>& tags) {
  std::string out = detail::format_tags(tags);
  out += kLabelHeader;
  out += '\n';
  const std::string variant(variant_keyword(table.variant));
  for (std::size_t i = 0; i < table.keys.size(); ++i) {
    const auto& k = table.keys[i];
    const auto& l = table.labels[i];
    out += std::to_string(k.subject.value) + ',' + std::to_string(k.hour_index) + ',' + variant + ',' +
           (l.happy ? '1' : '0') + ',' + (l.upset ? '1' : '0') + ',' + (l.stressed ? '1' : '0');
    for (const auto& v : table.ema[i]) {
      out += ',';
      if (v) out += detail::format_double(*v);
    }
    out += '\n';
  }
  detail::write_file(path, out);
}

LabelTable read_label_csv(const std::filesystem::path& path, std::map<std::string, std::string>* tags) {
  detail::LineReader reader(path);
  LabelTable t;
  bool have_header = false;
  bool have_variant = false;
  std::string line;
  auto fail = [&](const std::string& what) { throw ParseError(reader.name(), reader.line_number(), what); };
  auto flag = [&](std::string_view s) {
    if (s == "1") return true;
    if (s == "0") return false;
    fail("bad flag '" + std::string(s) + "'");
    return false;
  };
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto tag = detail::parse_tag_line(line); tag && tags) (*tags)[tag->first] = tag->second;
      continue;
    }
    if (!have_header) {
      if (line != kLabelHeader) fail("expected header '" + std::string(kLabelHeader) + "'");
      have_header = true;
      continue;
    }
    const auto f = detail::split_fields(line);
    if (f.size() != 6 + kEmaTopicCount) fail("expected 11 columns");
    const auto subject = detail::parse_i64(f[0]);
    const auto hour = detail::parse_i64(f[1]);
    const auto variant = parse_variant(f[2]);
    if (!subject || *subject < 0 || !hour || !variant) fail("bad key columns");
    if (have_variant && *variant != t.variant) fail("mixed variants in one label file");
    t.variant = *variant;
    have_variant = true;
    t.keys.push_back(HourKey{SubjectId{static_cast<std::uint32_t>(*subject)}, *hour});
    t.labels.push_back(MoodLabels{flag(f[3]), flag(f[4]), flag(f[5])});
    EmaValues values{};
    for (std::size_t i = 0; i < kEmaTopicCount; ++i) {
      if (f[6 + i].empty()) continue;
      auto v = detail::parse_double(f[6 + i]);
      if (!v) fail("bad EMA value '" + std::string(f[6 + i]) + "'");
      values[i] = *v;
    }
    t.ema.push_back(values);
  }
  if (!have_header) fail("missing header row");
  return t;
}

std::vector<MoodLabels> align_labels(const LabelTable& table, std::span<const HourKey> rows) {
  std::map<HourKey, std::size_t> index;
  for (std::size_t i = 0; i < table.keys.size(); ++i) index.emplace(table.keys[i], i);
  std::vector<MoodLabels> out;
  out.reserve(rows.size());
  for (const auto& key : rows) {
    auto it = index.find(key);
    if (it == index.end()) {
      throw DataError("no label for subject " + std::to_string(key.subject.value) + " hour " +
                      std::to_string(key.hour_index));
    }
    out.push_back(table.labels[it->second]);
  }
  return out;
}

}  // namespace moodid
