#include <gtest/gtest.h>

#include <clocale>
#include <locale>

#include "moodid/errors.hpp"
#include "moodid/ingest.hpp"
#include "moodid/rng.hpp"
#include "moodid/synthgen.hpp"
#include "support/test_support.hpp"

using namespace moodid;
using testsupport::TempDir;

namespace {

const StudyWindow kWindow{kDefaultSynthStart, kDefaultSynthStart + 2 * kSecondsPerDay};

DatasetManifest manifest_in(const TempDir& dir, std::vector<SubjectId> subjects = {SubjectId{1}, SubjectId{2}}) {
  return make_manifest(kWindow, std::move(subjects), dir.path());
}

TelemetryEvent random_event(Rng& rng, const StudyWindow& w) {
  const SubjectId s{static_cast<std::uint32_t>(1 + rng.below(3))};
  const EpochSeconds t = w.start + static_cast<EpochSeconds>(rng.below(static_cast<std::uint64_t>(w.end - w.start)));
  switch (rng.below(7)) {
    case 0: return Call{s, t, rng.uniform(0, 3000)};
    case 1: return AppTask{s, t, "com.app" + std::to_string(rng.below(50))};
    case 2: return GpsFix{s, t, rng.uniform(-90, 90), rng.uniform(-180, 180)};
    case 3: return AudioInf{s, t, static_cast<int>(rng.below(4))};
    case 4: return ActivityInf{s, t, static_cast<int>(rng.below(4))};
    case 5: return LockEvent{s, t};
    default: {
      const EmaTopic topic = kEmaTopics[rng.below(5)];
      const auto r = topic_range(topic);
      const double v = rng.bernoulli(0.5) ? static_cast<double>(rng.between(static_cast<int>(r.lo), static_cast<int>(r.hi)))
                                          : rng.uniform(r.lo, r.hi);
      return EmaResponse{s, t, topic, v};
    }
  }
}

}  // namespace

TEST(Ingest, EmptyFilesGiveNoEvents) {
  TempDir dir;
  const auto m = manifest_in(dir);
  for (EventKind k : kEventKinds) testsupport::spit(m.path_of(k), "");
  EXPECT_TRUE(load_dataset(m).empty());
}

TEST(Ingest, HeaderOnlyFilesGiveNoEvents) {
  TempDir dir;
  const auto m = manifest_in(dir);
  write_dataset({}, m);
  EXPECT_TRUE(load_dataset(m).empty());
}

TEST(Ingest, SynthEventCountMatchesGenerator) {
  TempDir dir;
  const auto scenario = make_scenario("tiny", 3);
  const auto out = generate(scenario.profiles, 2, 3);
  ASSERT_EQ(out.window.grid_length(), 48);
  ASSERT_EQ(out.subjects.size(), 2u);
  const auto m = write_synth(out, dir.path());
  const auto loaded = load_dataset(read_manifest(dir / "manifest.json"));
  EXPECT_EQ(loaded.size(), out.events.size());
  EXPECT_EQ(loaded, out.events);
  (void)m;
}

TEST(Ingest, MalformedRowNamesItsLine) {
  TempDir dir;
  const auto m = manifest_in(dir);
  write_dataset({}, m);
  std::string body = "subject,epoch_s\n";
  for (int i = 0; i < 100; ++i) {
    if (i == 41) {
      body += "1,notanumber\n";
    } else {
      body += "1," + std::to_string(kWindow.start + i) + "\n";
    }
  }
  testsupport::spit(m.path_of(EventKind::Lock), body);
  try {
    load_dataset(m);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 43u);  // header is line 1, row i is line i + 2
    EXPECT_NE(std::string(e.what()).find(":43:"), std::string::npos);
    EXPECT_NE(e.file().find("locks.csv"), std::string::npos);
  }
}

TEST(Ingest, WrongColumnCountIsParseError) {
  TempDir dir;
  const auto m = manifest_in(dir);
  write_dataset({}, m);
  testsupport::spit(m.path_of(EventKind::Gps), "subject,epoch_s,lat,lon\n1," + std::to_string(kWindow.start) + ",1.0\n");
  EXPECT_THROW(load_dataset(m), ParseError);
}

TEST(Ingest, WrongHeaderIsParseError) {
  TempDir dir;
  const auto m = manifest_in(dir);
  write_dataset({}, m);
  testsupport::spit(m.path_of(EventKind::Call), "who,when,how_long\n");
  EXPECT_THROW(load_dataset(m), ParseError);
}

TEST(Ingest, RoundTripOfRandomEvents) {
  TempDir dir;
  const auto m = manifest_in(dir, {SubjectId{1}, SubjectId{2}, SubjectId{3}});
  Rng rng(2024);
  std::vector<TelemetryEvent> events;
  for (int i = 0; i < 1000; ++i) events.push_back(random_event(rng, kWindow));
  canonicalize(events);
  write_dataset(events, m);
  EXPECT_EQ(load_dataset(m), events);
}

TEST(Ingest, RoundTripPropertyOverSeeds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TempDir dir;
    const auto m = manifest_in(dir, {SubjectId{1}, SubjectId{2}, SubjectId{3}});
    Rng rng(seed);
    std::vector<TelemetryEvent> events;
    const auto n = rng.below(200);
    for (std::uint64_t i = 0; i < n; ++i) events.push_back(random_event(rng, kWindow));
    canonicalize(events);
    write_dataset(events, m);
    ASSERT_EQ(load_dataset(m), events) << "seed " << seed;
  }
}

TEST(Ingest, DuplicateTimestampsKeepInputOrder) {
  TempDir dir;
  const auto m = manifest_in(dir);
  const EpochSeconds t = kWindow.start + 500;
  std::vector<TelemetryEvent> events{AppTask{SubjectId{1}, t, "zeta"}, AppTask{SubjectId{1}, t, "alpha"},
                                     AppTask{SubjectId{1}, t, "mid"}};
  write_dataset(events, m);
  const auto loaded = load_dataset(m);
  ASSERT_EQ(loaded.size(), 3u);
  EXPECT_EQ(std::get<AppTask>(loaded[0]).task_id, "zeta");
  EXPECT_EQ(std::get<AppTask>(loaded[1]).task_id, "alpha");
  EXPECT_EQ(std::get<AppTask>(loaded[2]).task_id, "mid");
}

TEST(Ingest, CanonicalOrderIsSubjectTimeKind) {
  std::vector<TelemetryEvent> events{LockEvent{SubjectId{2}, 10}, AppTask{SubjectId{1}, 20, "x"},
                                     LockEvent{SubjectId{1}, 20}, Call{SubjectId{1}, 20, 1.0},
                                     GpsFix{SubjectId{1}, 5, 0, 0}};
  canonicalize(events);
  EXPECT_EQ(kind_of(events[0]), EventKind::Gps);
  EXPECT_EQ(kind_of(events[1]), EventKind::Call);
  EXPECT_EQ(kind_of(events[2]), EventKind::App);
  EXPECT_EQ(kind_of(events[3]), EventKind::Lock);
  EXPECT_EQ(subject_of(events[4]), SubjectId{2});
}

TEST(Ingest, UnicodeTaskIdPreservedByteExact) {
  TempDir dir;
  const auto m = manifest_in(dir);
  const std::string id = "com.\xE5\xBE\xAE\xE4\xBF\xA1.caf\xC3\xA9\xF0\x9F\x98\x80";
  std::vector<TelemetryEvent> events{AppTask{SubjectId{1}, kWindow.start + 1, id}};
  write_dataset(events, m);
  const auto loaded = load_dataset(m);
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_EQ(std::get<AppTask>(loaded[0]).task_id, id);
}

TEST(Ingest, ParsingIgnoresProcessLocale) {
  TempDir dir;
  const auto m = manifest_in(dir);
  write_dataset({}, m);
  testsupport::spit(m.path_of(EventKind::Call),
                    "subject,start_epoch_s,duration_min\n1," + std::to_string(kWindow.start) + ",12.75\n");
  const char* previous = std::setlocale(LC_ALL, nullptr);
  const std::string saved = previous ? previous : "C";
  bool switched = false;
  for (const char* name : {"de_DE.UTF-8", "de_DE.utf8", "fr_FR.UTF-8", "ru_RU.UTF-8"}) {
    if (std::setlocale(LC_ALL, name)) {
      switched = true;
      break;
    }
  }
  const auto loaded = load_dataset(m);
  std::setlocale(LC_ALL, saved.c_str());
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_EQ(std::get<Call>(loaded[0]).duration_min, 12.75);
  if (!switched) GTEST_SKIP() << "no comma-decimal locale installed; parsed under the C locale only";
}

TEST(Ingest, CommentsAreSkipped) {
  TempDir dir;
  const auto m = manifest_in(dir);
  write_dataset({}, m);
  testsupport::spit(m.path_of(EventKind::Lock),
                    "# exported by hand\nsubject,epoch_s\n# a note\n2," + std::to_string(kWindow.start) + "\n");
  EXPECT_EQ(load_dataset(m).size(), 1u);
}

TEST(Ingest, OutOfWindowEventsAreRejectedNotDropped) {
  TempDir dir;
  const auto m = manifest_in(dir);
  write_dataset({}, m);
  testsupport::spit(m.path_of(EventKind::Lock), "subject,epoch_s\n1," + std::to_string(kWindow.end) + "\n1," +
                                                    std::to_string(kWindow.start - 5) + "\n");
  try {
    load_dataset(m);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.problems().size(), 2u);
    EXPECT_NE(e.problems()[0].find("locks.csv:2"), std::string::npos);
    EXPECT_NE(e.problems()[1].find("locks.csv:3"), std::string::npos);
  }
}

TEST(Ingest, UnknownSubjectIsRejected) {
  TempDir dir;
  const auto m = manifest_in(dir);
  write_dataset({}, m);
  testsupport::spit(m.path_of(EventKind::Lock), "subject,epoch_s\n9," + std::to_string(kWindow.start) + "\n");
  EXPECT_THROW(load_dataset(m), ValidationError);
}

TEST(Manifest, RoundTrip) {
  TempDir dir;
  auto m = manifest_in(dir, {SubjectId{4}, SubjectId{9}});
  m.metadata["generator"] = "hand";
  write_manifest(m, dir / "manifest.json");
  const auto back = read_manifest(dir / "manifest.json");
  EXPECT_EQ(back.window, m.window);
  EXPECT_EQ(back.subjects, m.subjects);
  EXPECT_EQ(back.metadata, m.metadata);
  for (EventKind k : kEventKinds) EXPECT_EQ(back.path_of(k), m.path_of(k));
}

TEST(Manifest, RejectsEmptyWindowAndDuplicates) {
  TempDir dir;
  EXPECT_THROW(make_manifest(StudyWindow{10, 10}, {SubjectId{1}}, dir.path()).validate(), DataError);
  EXPECT_THROW(make_manifest(kWindow, {SubjectId{1}, SubjectId{1}}, dir.path()).validate(), DataError);
}

TEST(DatasetHash, ChangesWithContent) {
  TempDir dir;
  const auto m = manifest_in(dir);
  write_dataset({}, m);
  const auto before = dataset_hash(m);
  EXPECT_EQ(before, dataset_hash(m));
  write_dataset(std::vector<TelemetryEvent>{LockEvent{SubjectId{1}, kWindow.start}}, m);
  EXPECT_NE(before, dataset_hash(m));
}

TEST(Iso8601, ParseAndFormat) {
  EXPECT_EQ(parse_iso8601("2013-03-25"), 1364169600);
  EXPECT_EQ(parse_iso8601("2013-03-25T00:00:00Z"), 1364169600);
  EXPECT_EQ(parse_iso8601("2013-03-25T02:00:00+02:00"), 1364169600);
  EXPECT_EQ(format_iso8601(1364169600), "2013-03-25T00:00:00Z");
  EXPECT_EQ(parse_iso8601(format_iso8601(1400000123)), 1400000123);
  EXPECT_THROW(parse_iso8601("2013-02-30"), DataError);
  EXPECT_THROW(parse_iso8601("yesterday"), DataError);
}
