#include "moodid/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "csv_util.hpp"
#include "moodid/mood.hpp"
#include "moodid/rng.hpp"

namespace moodid {

namespace fs = std::filesystem;

namespace {

bool is_prob(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_sets(const std::vector<AppSet>& sets, const std::string& who) {
  double total = 0.0;
  for (const auto& s : sets) {
    check(std::isfinite(s.weight) && s.weight >= 0.0, who + ": app-set weight must be non-negative");
    total += s.weight;
    for (const auto& t : s.tasks) {
      check(validate_event(AppTask{SubjectId{}, 0, t}, StudyWindow{0, 1}).empty(),
            who + ": invalid task id '" + t + "'");
    }
  }
  check(sets.empty() || total > 0.0, who + ": app-set weights sum to zero");
}

template <typename T>
std::vector<double> weights_of(const std::vector<T>& items) {
  std::vector<double> w;
  w.reserve(items.size());
  for (const auto& it : items) w.push_back(it.weight);
  return w;
}

struct Ctx {
  const SubjectProfile& p;
  EpochSeconds start;
  std::vector<TelemetryEvent>& events;
};

void emit_hour(Ctx& c, Rng& rng, std::int64_t hour, const std::array<bool, 3>& active,
               const std::vector<double>& app_w, const std::vector<double>& place_w) {
  const auto& p = c.p;
  const EpochSeconds h0 = c.start + hour * kSecondsPerHour;
  auto at = [&] { return h0 + static_cast<EpochSeconds>(rng.below(kSecondsPerHour)); };

  double lock_factor = 1.0;
  double call_factor = 1.0;
  for (std::size_t m = 0; m < 3; ++m) {
    if (!active[m]) continue;
    lock_factor *= p.shifts[m].lock_factor;
    call_factor *= p.shifts[m].call_factor;
  }

  const AppSet* set = nullptr;
  for (std::size_t m = 0; m < 3 && set == nullptr; ++m) {
    const auto& shift = p.shifts[m];
    if (active[m] && !shift.app_sets.empty() && rng.bernoulli(shift.app_prob)) {
      set = &shift.app_sets[rng.categorical(weights_of(shift.app_sets))];
    }
  }
  if (set == nullptr && !p.app_sets.empty()) set = &p.app_sets[rng.categorical(app_w)];
  if (set != nullptr) {
    for (const auto& t : set->tasks) c.events.emplace_back(AppTask{p.id, at(), t});
  }

  if (!p.places.empty()) {
    const int fixes = rng.poisson(p.gps_fix_rate);
    const Place& place = p.places[rng.categorical(place_w)];
    for (int i = 0; i < fixes; ++i) {
      const double lat = std::clamp(rng.normal(place.lat, p.gps_jitter_deg), -90.0, 90.0);
      const double lon = std::clamp(rng.normal(place.lon, p.gps_jitter_deg), -180.0, 180.0);
      c.events.emplace_back(GpsFix{p.id, at(), lat, lon});
    }
  }
  if (rng.bernoulli(p.stray_fix_prob)) {
    c.events.emplace_back(GpsFix{p.id, at(), rng.uniform(-80.0, 80.0), rng.uniform(-180.0, 180.0)});
  }

  const int locks = rng.poisson(p.lock_rate * lock_factor);
  for (int i = 0; i < locks; ++i) c.events.emplace_back(LockEvent{p.id, at()});

  if (rng.bernoulli(std::min(1.0, p.call_prob * call_factor))) {
    c.events.emplace_back(Call{p.id, at(), rng.lognormal(p.call_log_mean, p.call_log_sd)});
  }

  const int audio = rng.poisson(p.audio_rate);
  for (int i = 0; i < audio; ++i) {
    c.events.emplace_back(AudioInf{p.id, at(), static_cast<int>(rng.categorical(p.audio_probs))});
  }
  const int activity = rng.poisson(p.activity_rate);
  for (int i = 0; i < activity; ++i) {
    c.events.emplace_back(ActivityInf{p.id, at(), static_cast<int>(rng.categorical(p.activity_probs))});
  }
}

// Draws topic subsets and integer answers until classify_mood reproduces
// exactly the requested flags.
EmaValues consistent_answers(Rng& rng, const MoodLabels& target) {
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    EmaValues v{};
    bool any = false;
    for (EmaTopic t : kEmaTopics) {
      if (!rng.bernoulli(0.5)) continue;
      const auto r = topic_range(t);
      v[topic_index(t)] = static_cast<double>(rng.between(static_cast<std::int64_t>(r.lo),
                                                          static_cast<std::int64_t>(r.hi)));
      any = true;
    }
    if (any && classify_mood(v) == target) return v;
  }
  throw std::logic_error("could not draw EMA answers for the requested mood");
}

void generate_subject(const SubjectProfile& p, int days, std::uint64_t seed, EpochSeconds start,
                      std::vector<TelemetryEvent>& events, std::vector<MoodTruth>& truth,
                      std::array<std::size_t, 3>& episode_days) {
  const std::uint64_t subject_seed = derive_seed(seed, p.id.value);
  Rng schedule_rng(derive_seed(subject_seed, 0));
  Rng event_rng(derive_seed(subject_seed, 1));
  Rng ema_rng(derive_seed(subject_seed, 2));

  const std::int64_t hours = static_cast<std::int64_t>(days) * 24;
  std::vector<std::array<bool, 3>> active(static_cast<std::size_t>(hours), {false, false, false});
  for (int d = 0; d < days; ++d) {
    for (std::size_t m = 0; m < 3; ++m) {
      if (!schedule_rng.bernoulli(p.mood_day_prob[m])) continue;
      ++episode_days[m];
      const auto len = schedule_rng.between(p.episode_min_hours, p.episode_max_hours);
      const auto first = schedule_rng.between(p.episode_earliest_hour, 24 - len);
      for (std::int64_t h = first; h < first + len; ++h) active[static_cast<std::size_t>(d * 24 + h)][m] = true;
    }
  }

  const auto app_w = weights_of(p.app_sets);
  const auto place_w = weights_of(p.places);
  Ctx ctx{p, start, events};
  for (std::int64_t h = 0; h < hours; ++h) {
    const auto& a = active[static_cast<std::size_t>(h)];
    for (std::size_t m = 0; m < 3; ++m) {
      if (a[m]) truth.push_back(MoodTruth{p.id, h, kMoods[m]});
    }
    emit_hour(ctx, event_rng, h, a, app_w, place_w);
  }

  for (int d = 0; d < days; ++d) {
    if (!ema_rng.bernoulli(p.ema_day_prob)) continue;
    for (int hd = 0; hd < 24; ++hd) {
      if (!ema_rng.bernoulli(p.ema_rate)) continue;
      const std::int64_t h = d * 24 + hd;
      const auto& a = active[static_cast<std::size_t>(h)];
      const MoodLabels target{a[0], a[1], a[2]};
      const EmaValues values = consistent_answers(ema_rng, target);
      const EpochSeconds t = start + h * kSecondsPerHour + static_cast<EpochSeconds>(ema_rng.below(kSecondsPerHour));
      for (EmaTopic topic : kEmaTopics) {
        if (const auto& v = values[topic_index(topic)]) events.emplace_back(EmaResponse{p.id, t, topic, *v});
      }
    }
  }
}

std::string fmt_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02zu", prefix, i);
  return buf;
}

// Share of hours under an episode per mood, ignoring overlaps.
double scheduled_share(const SubjectProfile& p) {
  const double mean_len = 0.5 * (p.episode_min_hours + p.episode_max_hours);
  double f = 0.0;
  for (double q : p.mood_day_prob) f += q * mean_len / 24.0;
  return f;
}

constexpr std::array<double, 3> kPaperlikeShares{0.06, 0.06, 0.10};

std::array<double, 3> day_probs_for(const std::array<double, 3>& shares, int min_len, int max_len) {
  const double mean_len = 0.5 * (min_len + max_len);
  std::array<double, 3> out{};
  for (std::size_t m = 0; m < 3; ++m) out[m] = std::min(1.0, shares[m] * 24.0 / mean_len);
  return out;
}

Scenario paperlike(std::uint64_t seed, int n) {
  Rng rng(derive_seed(seed, 0x9a9e11ce));
  Scenario sc{"paperlike", {}, 60};
  std::vector<Place> shared_places;
  for (int k = 0; k < 17; ++k) {
    shared_places.push_back(Place{30.0 + 2.5 * (k % 6), -100.0 + 2.5 * (k / 6), 1.0});
  }
  std::vector<std::string> shared_tasks;
  for (std::size_t k = 0; k < 12; ++k) shared_tasks.push_back(fmt_id("com.shared.t", k));

  for (int i = 0; i < n; ++i) {
    SubjectProfile p;
    p.id = SubjectId{static_cast<std::uint32_t>(i)};
    const std::string me = fmt_id("u", static_cast<std::size_t>(i));
    p.app_sets.push_back(AppSet{{}, 0.3});
    for (int k = 0; k < 5; ++k) {
      AppSet s;
      const auto count = rng.between(1, 3);
      for (std::int64_t j = 0; j < count; ++j) s.tasks.push_back(shared_tasks[rng.below(shared_tasks.size())]);
      s.weight = 0.06 * rng.uniform(0.5, 1.5);
      p.app_sets.push_back(std::move(s));
    }
    for (std::size_t k = 0; k < 6; ++k) {
      AppSet s;
      s.tasks.push_back("com." + me + ".a" + std::to_string(k));
      if (rng.bernoulli(0.5)) s.tasks.push_back(shared_tasks[rng.below(shared_tasks.size())]);
      s.weight = 0.4 / 6.0 * rng.uniform(0.5, 1.5);
      p.app_sets.push_back(std::move(s));
    }
    p.places.push_back(shared_places[static_cast<std::size_t>(i) % shared_places.size()]);
    p.places.back().weight = 0.6;
    for (int k = 0; k < 2; ++k) {
      Place extra = shared_places[rng.below(shared_places.size())];
      extra.weight = 0.2;
      p.places.push_back(extra);
    }
    p.gps_fix_rate = 1.5;
    p.stray_fix_prob = 0.05;
    p.lock_rate = rng.uniform(1.0, 4.0);
    p.call_prob = rng.uniform(0.03, 0.2);
    p.audio_rate = 2.0;
    p.activity_rate = 2.0;
    p.mood_day_prob = day_probs_for(kPaperlikeShares, p.episode_min_hours, p.episode_max_hours);
    p.shifts[0] = MoodShift{0.8, 1.5, 0.3, {AppSet{{"com." + me + ".happy"}, 1.0}}};
    p.shifts[1] = MoodShift{1.5, 0.5, 0.3, {AppSet{{"com." + me + ".upset"}, 1.0}}};
    p.shifts[2] = MoodShift{1.3, 1.0, 0.3, {AppSet{{"com." + me + ".stress", shared_tasks[0]}, 1.0}}};
    p.ema_day_prob = 0.61;
    p.ema_rate = 0.169;
    sc.profiles.push_back(std::move(p));
  }
  return sc;
}

Scenario disjoint(int n) {
  Scenario sc{"disjoint", {}, 3};
  for (int i = 0; i < n; ++i) {
    SubjectProfile p;
    p.id = SubjectId{static_cast<std::uint32_t>(i)};
    const std::string me = fmt_id("d", static_cast<std::size_t>(i));
    const std::string t0 = "org." + me + ".t0";
    const std::string t1 = "org." + me + ".t1";
    const std::string t2 = "org." + me + ".t2";
    p.app_sets = {AppSet{{t0, t1}, 0.7}, AppSet{{t0}, 0.2}, AppSet{{t2}, 0.1}};
    p.places = {Place{-40.0 + 3.0 * (i % 20), 10.0 + 3.0 * (i / 20), 1.0}};
    p.gps_fix_rate = 4.0;
    p.mood_day_prob = {0.3, 0.3, 0.3};
    p.ema_rate = 0.3;
    sc.profiles.push_back(std::move(p));
  }
  return sc;
}

Scenario mood_effect(int n) {
  Scenario sc{"mood_effect", {}, 4};
  const std::vector<std::string> shared = {"com.shared.mail", "com.shared.web", "com.shared.chat"};
  constexpr double kPersonalRate = 0.4;
  constexpr double kMoodOnlyShare = 0.2;
  for (int i = 0; i < n; ++i) {
    SubjectProfile p;
    p.id = SubjectId{static_cast<std::uint32_t>(i)};
    const std::string me = fmt_id("m", static_cast<std::size_t>(i));
    const double rest = (1.0 - kPersonalRate) / 6.0;
    p.app_sets = {AppSet{{}, 3.0 * rest}, AppSet{{shared[0]}, rest}, AppSet{{shared[1], shared[2]}, rest},
                  AppSet{{shared[2]}, rest}, AppSet{{"com." + me + ".p0"}, kPersonalRate}};
    // Apps are the only channel, so the effect is not masked by sensor noise.
    p.lock_rate = 0.0;
    p.call_prob = 0.0;
    p.audio_rate = 0.0;
    p.activity_rate = 0.0;
    p.episode_min_hours = 6;
    p.episode_max_hours = 12;
    p.mood_day_prob = day_probs_for(kPaperlikeShares, p.episode_min_hours, p.episode_max_hours);
    // Mood hours always open the personal app and add the mood-only app with
    // probability x. Mood-only ids are then f*x out of (1-f)*q + f*(1+x).
    const double f = scheduled_share(p);
    const double x = std::min(1.0, ((1.0 - f) * kPersonalRate + f) * kMoodOnlyShare / ((1.0 - kMoodOnlyShare) * f));
    for (std::size_t m = 0; m < 3; ++m) {
      const std::string personal = "com." + me + ".p0";
      const std::string mood_only = "com." + me + "." + std::string(mood_keyword(kMoods[m]));
      p.shifts[m].app_prob = 1.0;
      p.shifts[m].app_sets = {AppSet{{personal, mood_only}, x}, AppSet{{personal}, 1.0 - x}};
    }
    p.ema_day_prob = 1.0;
    p.ema_rate = 1.0;
    sc.profiles.push_back(std::move(p));
  }
  return sc;
}

Scenario tiny(int n) {
  Scenario sc{"tiny", {}, 2};
  for (int i = 0; i < n; ++i) {
    SubjectProfile p;
    p.id = SubjectId{static_cast<std::uint32_t>(i)};
    const std::string me = fmt_id("t", static_cast<std::size_t>(i));
    p.app_sets = {AppSet{{}, 0.5}, AppSet{{"net." + me + ".a"}, 0.5}};
    p.places = {Place{10.0 * i, 5.0, 1.0}};
    p.mood_day_prob = {0.5, 0.5, 0.5};
    p.ema_rate = 0.3;
    sc.profiles.push_back(std::move(p));
  }
  return sc;
}

}  // namespace

void SubjectProfile::validate() const {
  const std::string who = "subject " + std::to_string(id.value);
  check_sets(app_sets, who);
  double place_total = 0.0;
  for (const auto& pl : places) {
    check(std::isfinite(pl.weight) && pl.weight >= 0.0, who + ": place weight must be non-negative");
    check(std::abs(pl.lat) <= 90.0 && std::abs(pl.lon) <= 180.0, who + ": place out of range");
    place_total += pl.weight;
  }
  check(places.empty() || place_total > 0.0, who + ": place weights sum to zero");
  check(std::isfinite(gps_jitter_deg) && gps_jitter_deg >= 0.0, who + ": gps jitter must be non-negative");
  check(std::isfinite(gps_fix_rate) && gps_fix_rate >= 0.0 && gps_fix_rate <= 50.0, who + ": bad gps fix rate");
  check(is_prob(stray_fix_prob), who + ": stray fix probability outside [0,1]");
  check(std::isfinite(lock_rate) && lock_rate >= 0.0 && lock_rate <= 50.0, who + ": bad lock rate");
  check(is_prob(call_prob), who + ": call probability outside [0,1]");
  check(std::isfinite(call_log_mean) && std::isfinite(call_log_sd) && call_log_sd >= 0.0,
        who + ": bad call duration parameters");
  for (const auto* probs : {&audio_probs, &activity_probs}) {
    double total = 0.0;
    for (double q : *probs) {
      check(is_prob(q), who + ": class probability outside [0,1]");
      total += q;
    }
    check(std::abs(total - 1.0) < 1e-9, who + ": class probabilities must sum to 1");
  }
  check(std::isfinite(audio_rate) && audio_rate >= 0.0 && audio_rate <= 50.0, who + ": bad audio rate");
  check(std::isfinite(activity_rate) && activity_rate >= 0.0 && activity_rate <= 50.0, who + ": bad activity rate");
  for (double q : mood_day_prob) check(is_prob(q), who + ": mood day probability outside [0,1]");
  check(episode_earliest_hour >= 0 && episode_min_hours >= 1 && episode_min_hours <= episode_max_hours &&
            episode_earliest_hour + episode_max_hours <= 24,
        who + ": episodes must satisfy 1 <= min <= max and earliest + max <= 24");
  for (const auto& s : shifts) {
    check(std::isfinite(s.lock_factor) && s.lock_factor >= 0.0,
          who + ": bad lock factor");
    check(std::isfinite(s.call_factor) && s.call_factor >= 0.0, who + ": bad call factor");
    check(is_prob(s.app_prob), who + ": mood app probability outside [0,1]");
    check(s.app_prob == 0.0 || !s.app_sets.empty(), who + ": mood app probability without app sets");
    check_sets(s.app_sets, who);
  }
  check(is_prob(ema_day_prob) && is_prob(ema_rate), who + ": EMA rates outside [0,1]");
}

SynthOutput generate(const std::vector<SubjectProfile>& profiles, int days, std::uint64_t seed, EpochSeconds start) {
  if (profiles.size() < 2) throw std::invalid_argument("need at least two subject profiles");
  if (days < 2) throw std::invalid_argument("need at least two days");
  std::set<SubjectId> ids;
  for (const auto& p : profiles) {
    p.validate();
    if (!ids.insert(p.id).second) throw std::invalid_argument("duplicate subject id " + std::to_string(p.id.value));
  }

  SynthOutput out;
  out.window = StudyWindow{start, start + static_cast<EpochSeconds>(days) * kSecondsPerDay};
  out.subjects.assign(ids.begin(), ids.end());
  for (const auto& p : profiles) generate_subject(p, days, seed, start, out.events, out.truth, out.episode_days);
  canonicalize(out.events);
  std::sort(out.truth.begin(), out.truth.end());
  return out;
}

std::vector<std::string> scenario_names() { return {"paperlike", "disjoint", "mood_effect", "tiny"}; }

Scenario make_scenario(std::string_view name, std::uint64_t seed, int subjects, int days) {
  if (subjects < 0 || days < 0) throw std::invalid_argument("subject and day counts must be positive");
  Scenario sc;
  if (name == "paperlike") {
    sc = paperlike(seed, subjects ? subjects : 19);
  } else if (name == "disjoint") {
    sc = disjoint(subjects ? subjects : 5);
  } else if (name == "mood_effect") {
    sc = mood_effect(subjects ? subjects : 6);
  } else if (name == "tiny") {
    sc = tiny(subjects ? subjects : 2);
  } else {
    std::string valid;
    for (const auto& n : scenario_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "' (valid: " + valid + ")");
  }
  if (days) sc.days = days;
  return sc;
}

std::string ground_truth_csv(const std::vector<MoodTruth>& truth) {
  std::ostringstream out;
  out << "subject,hour_index,mood\n";
  for (const auto& t : truth) out << t.subject.value << ',' << t.hour_index << ',' << mood_keyword(t.mood) << '\n';
  return out.str();
}

DatasetManifest write_synth(const SynthOutput& out, const fs::path& dir,
                            const std::map<std::string, std::string>& metadata) {
  fs::create_directories(dir);
  DatasetManifest manifest = make_manifest(out.window, out.subjects, dir);
  manifest.metadata = metadata;
  write_dataset(out.events, manifest);
  write_manifest(manifest, dir / "manifest.json");
  detail::write_file(dir / "ground_truth.csv", ground_truth_csv(out.truth));
  return manifest;
}

}  // namespace moodid
