#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "moodid/errors.hpp"
#include "moodid/featurize.hpp"
#include "moodid/harness.hpp"
#include "moodid/hash.hpp"
#include "moodid/ingest.hpp"
#include "moodid/mood.hpp"
#include "moodid/results_io.hpp"
#include "moodid/synthgen.hpp"

namespace moodid::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "moodid 0.1.0";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string config;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::uint64_t require_seed(const Globals& g, const char* command) {
  if (!g.seed) throw UsageError(std::string(command) + " needs --seed; no default seed is used");
  return *g.seed;
}

std::string tag_or_empty(const std::map<std::string, std::string>& tags, const std::string& key) {
  const auto it = tags.find(key);
  return it == tags.end() ? std::string() : it->second;
}

// ---- synth ----

struct SynthArgs {
  std::string scenario;
  std::string out;
  int days = 0;
  int subjects = 0;
};

int cmd_synth(const Globals& g, SynthArgs a, std::ostream& out) {
  if (!g.config.empty()) {
    const json cfg = parse_json_file(g.config);
    if (a.scenario.empty()) a.scenario = cfg.value("scenario", "");
    if (a.days == 0) a.days = cfg.value("days", 0);
    if (a.subjects == 0) a.subjects = cfg.value("subjects", 0);
  }
  if (a.scenario.empty()) a.scenario = "paperlike";
  const std::uint64_t seed = require_seed(g, "synth");
  const Scenario sc = make_scenario(a.scenario, seed, a.subjects, a.days);
  const SynthOutput data = generate(sc.profiles, sc.days, seed);
  const std::map<std::string, std::string> meta = {
      {"generator", kToolVersion},
      {"scenario", sc.name},
      {"seed", std::to_string(seed)},
      {"days", std::to_string(sc.days)},
      {"subjects", std::to_string(sc.profiles.size())}};
  write_synth(data, a.out, meta);
  out << "synth: scenario " << sc.name << ", " << sc.profiles.size() << " subjects, " << sc.days << " days, "
      << data.events.size() << " events -> " << a.out << "\n";
  return kOk;
}

// ---- featurize ----

struct FeaturizeArgs {
  std::string manifest;
  std::string out;
  double eps = 0.5;
  std::size_t min_pts = 5;
};

int cmd_featurize(const FeaturizeArgs& a, std::ostream& out) {
  const DatasetManifest manifest = read_manifest(a.manifest);
  const auto events = load_dataset(manifest);
  if (manifest.subjects.empty() || manifest.window.grid_length() == 0) throw DataError("dataset is empty");
  FeaturizeOptions opts;
  opts.dbscan.eps = a.eps;
  opts.dbscan.min_pts = a.min_pts;
  const Featurized f = featurize(events, manifest.window, manifest.subjects, opts);

  json settings{{"dbscan_eps", a.eps}, {"dbscan_min_pts", a.min_pts}};
  const std::string data_hash = dataset_hash(manifest);
  const std::map<std::string, std::string> tags = {
      {"dataset_hash", data_hash},
      {"config_hash", hash_hex(settings.dump())},
      {"study_start", format_iso8601(manifest.window.start)},
      {"study_end", format_iso8601(manifest.window.end)}};
  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_feature_csv(f.matrix, dir / "features.csv", tags);

  json meta;
  meta["tool"] = kToolVersion;
  meta["dataset_hash"] = data_hash;
  meta["settings"] = settings;
  meta["config_hash"] = hash_hex(settings.dump());
  meta["features_hash"] = hash_hex(slurp(dir / "features.csv"));
  meta["rows"] = f.matrix.row_count();
  meta["columns"] = f.matrix.col_count();
  meta["app_vocabulary"] = f.app_vocab.size();
  meta["gps_vocabulary"] = f.gps_vocab.size();
  meta["gps_fixes"] = f.gps_fixes;
  meta["gps_clusters"] = f.gps_clusters;
  dump(dir / "features.json", meta.dump(1) + "\n");
  out << "featurize: " << f.matrix.row_count() << " rows x " << f.matrix.col_count() << " columns ("
      << f.app_vocab.size() << " app tokens, " << f.gps_vocab.size() << " gps tokens)\n";
  return kOk;
}

// ---- label ----

struct LabelArgs {
  std::string manifest;
  std::string variant = "all";
  std::string out;
};

int cmd_label(const LabelArgs& a, std::ostream& out) {
  std::vector<DatasetVariant> variants;
  if (a.variant == "all") {
    variants = {DatasetVariant::Raw, DatasetVariant::H, DatasetVariant::D};
  } else if (const auto v = parse_variant(a.variant)) {
    variants = {*v};
  } else {
    throw UsageError("unknown variant '" + a.variant + "' (valid: raw, H, D, all)");
  }
  const DatasetManifest manifest = read_manifest(a.manifest);
  const auto events = load_dataset(manifest);
  const std::string data_hash = dataset_hash(manifest);
  const EmaHourly raw = average_hourly(events, manifest.window);
  const std::int64_t grid = manifest.window.grid_length();
  const fs::path dir(a.out);
  fs::create_directories(dir);

  json coverage = json::object();
  for (DatasetVariant v : variants) {
    const EmaHourly ema = make_variant(v, raw, manifest.window);
    const LabelTable table = build_label_table(v, ema, manifest.subjects, grid);
    const std::string name(variant_keyword(v));
    write_label_csv(table, dir / ("labels_" + name + ".csv"),
                    {{"dataset_hash", data_hash},
                     {"variant", name},
                     {"config_hash", hash_hex(json{{"variant", name}}.dump())}});
    const CoverageReport rep = coverage_report(v, ema, manifest.subjects, grid);
    coverage[name] = json{{"total_samples", rep.total_samples},
                          {"labeled", rep.labeled_count},
                          {"fraction", rep.fraction},
                          {"happy", rep.mood_totals.happy},
                          {"upset", rep.mood_totals.upset},
                          {"stressed", rep.mood_totals.stressed}};
    out << "label " << name << ": " << rep.labeled_count << "/" << rep.total_samples << " labeled ("
        << rep.fraction * 100.0 << "%), happy " << rep.mood_totals.happy << ", upset " << rep.mood_totals.upset
        << ", stressed " << rep.mood_totals.stressed << "\n";
  }
  const fs::path cov_path = dir / "coverage.json";
  json merged = fs::exists(cov_path) ? parse_json_file(cov_path) : json::object();
  merged["dataset_hash"] = data_hash;
  for (auto& [k, v] : coverage.items()) merged[k] = v;
  dump(cov_path, merged.dump(1) + "\n");
  return kOk;
}

// ---- run ----

struct RunSpec {
  fs::path features;
  fs::path labels;
  fs::path output;
  std::vector<int> deltas{4};
  std::vector<Regime> regimes{Regime::All};
  std::vector<Mood> moods{Mood::Happy, Mood::Upset, Mood::Stressed};
  std::vector<DatasetVariant> variants{DatasetVariant::H, DatasetVariant::D};
  LearnParams learn;
  int stride = 1;
};

template <typename T, typename F>
std::vector<T> keyword_list(const json& j, const char* key, F parse) {
  std::vector<T> out;
  for (const auto& item : j.at(key)) {
    const auto v = parse(item.get<std::string>());
    if (!v) throw UsageError(std::string("runspec: bad value in '") + key + "': " + item.get<std::string>());
    out.push_back(*v);
  }
  return out;
}

RunSpec read_runspec(const fs::path& path) {
  const json j = parse_json_file(path);
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  RunSpec s;
  try {
    s.features = resolve(j.at("features").get<std::string>());
    if (j.contains("labels")) s.labels = resolve(j["labels"].get<std::string>());
    s.output = resolve(j.at("output").get<std::string>());
    if (j.contains("deltas")) s.deltas = j["deltas"].get<std::vector<int>>();
    if (j.contains("regimes")) s.regimes = keyword_list<Regime>(j, "regimes", parse_regime);
    if (j.contains("moods")) s.moods = keyword_list<Mood>(j, "moods", parse_mood);
    if (j.contains("variants")) s.variants = keyword_list<DatasetVariant>(j, "variants", parse_variant);
    if (j.contains("learn")) s.learn = learn_params_from_json(j["learn"].dump());
    s.stride = j.value("stride", 1);
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  if (s.deltas.empty() || s.regimes.empty()) throw UsageError("runspec: deltas and regimes must be non-empty");
  if (!fs::exists(s.features)) throw DataError("features file not found: " + s.features.string());
  return s;
}

std::vector<ExperimentConfig> expand(const RunSpec& s, std::uint64_t seed) {
  std::vector<ExperimentConfig> out;
  for (int delta : s.deltas) {
    for (Regime r : s.regimes) {
      ExperimentConfig base;
      base.delta = delta;
      base.regime = r;
      base.learn = s.learn;
      base.master_seed = seed;
      base.stride = s.stride;
      if (r == Regime::All) {
        out.push_back(base);
        continue;
      }
      for (DatasetVariant v : s.variants) {
        for (Mood m : s.moods) {
          ExperimentConfig c = base;
          c.mood = m;
          c.variant = v;
          out.push_back(c);
        }
      }
    }
  }
  for (const auto& c : out) {
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("runspec: ") + e.what());
    }
  }
  return out;
}

int cmd_run(const Globals& g, std::ostream& out, std::ostream& err) {
  if (g.config.empty()) throw UsageError("run needs --config <runspec.json>");
  const std::uint64_t seed = require_seed(g, "run");
  const RunSpec spec = read_runspec(g.config);
  const auto configs = expand(spec, seed);

  std::map<std::string, std::string> feature_tags;
  const FeatureMatrix matrix = read_feature_csv(spec.features, &feature_tags);
  const std::string data_hash = tag_or_empty(feature_tags, "dataset_hash");
  const std::string features_hash = hash_hex(slurp(spec.features));

  std::map<DatasetVariant, std::vector<MoodLabels>> labels;
  std::map<DatasetVariant, std::string> label_hashes;
  for (const auto& c : configs) {
    if (c.regime == Regime::All || labels.count(c.variant)) continue;
    if (spec.labels.empty()) throw UsageError("runspec: mood regimes need a 'labels' directory");
    const fs::path p = spec.labels / ("labels_" + std::string(variant_keyword(c.variant)) + ".csv");
    std::map<std::string, std::string> tags;
    const LabelTable table = read_label_csv(p, &tags);
    if (tag_or_empty(tags, "dataset_hash") != data_hash) {
      throw DataError("stale input: " + p.string() + " was built from dataset " + tag_or_empty(tags, "dataset_hash") +
                      " but the features come from " + data_hash);
    }
    labels[c.variant] = align_labels(table, matrix.rows);
    label_hashes[c.variant] = hash_hex(slurp(p));
  }

  fs::create_directories(spec.output);
  json index;
  index["tool"] = kToolVersion;
  index["features"] = fs::absolute(spec.features).lexically_normal().string();
  index["labels"] = spec.labels.empty() ? "" : fs::absolute(spec.labels).lexically_normal().string();
  index["dataset_hash"] = data_hash;
  index["features_hash"] = features_hash;
  index["seed"] = seed;
  index["experiments"] = json::array();
  std::size_t completed = 0;
  for (const auto& c : configs) {
    const std::string hash = config_hash(c);
    const std::string stem = c.tag() + "_" + hash.substr(0, 8);
    json entry{{"tag", c.tag()}, {"config_hash", hash}};
    try {
      const std::span<const MoodLabels> lab =
          c.regime == Regime::All ? std::span<const MoodLabels>() : std::span<const MoodLabels>(labels.at(c.variant));
      const ExperimentResult r = run_experiment(c, matrix, lab, g.jobs);
      ResultFile file{r, {{"dataset_hash", data_hash}, {"features_hash", features_hash}}};
      if (c.regime != Regime::All) file.provenance["labels_hash"] = label_hashes.at(c.variant);
      write_result_json(spec.output / ("result_" + stem + ".json"), file);
      write_window_csv(spec.output / ("windows_" + stem + ".csv"), r);
      entry["status"] = "ok";
      entry["result"] = "result_" + stem + ".json";
      entry["mean_f"] = r.mean_f;
      entry["evaluated_windows"] = r.windows.size();
      entry["skipped_windows"] = r.skipped.size();
      ++completed;
      out << "run " << c.tag() << ": mean F " << r.mean_f << " over " << r.windows.size() << " windows ("
          << r.skipped.size() << " skipped)\n";
    } catch (const NoEvaluableWindows& e) {
      entry["status"] = "no_evaluable_windows";
      entry["message"] = e.what();
      err << "warning: " << e.what() << "\n";
    }
    index["experiments"].push_back(entry);
  }
  dump(spec.output / "run.json", index.dump(1) + "\n");
  if (completed == 0) throw DataError("no experiment produced a result");
  return kOk;
}

// ---- report ----

struct ReportArgs {
  std::string results;
  std::string out;
  std::string labels;
  std::size_t top_k = 0;
};

std::string group_of(const ExperimentConfig& c) {
  if (c.regime == Regime::All) return "default";
  return std::string(regime_keyword(c.regime)) + "_" + std::string(mood_keyword(c.mood)) + "_" +
         std::string(variant_keyword(c.variant));
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const fs::path dir(a.results);
  if (!fs::is_directory(dir)) throw DataError("results directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("result_", 0) == 0 && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no result files in " + dir.string());

  std::vector<ResultFile> results;
  for (const auto& f : files) results.push_back(read_result_json(f));
  const fs::path out_dir = a.out.empty() ? dir : fs::path(a.out);
  fs::create_directories(out_dir);

  std::map<int, double> all_f;
  for (const auto& r : results) {
    if (r.result.config.regime == Regime::All) all_f[r.result.config.delta] = r.result.mean_f;
  }

  json agg = json::array();
  std::ostringstream csv;
  csv << "tag,delta,regime,mood,variant,mean_f,min_f,max_f,mean_precision,mean_recall,mean_micro_f,"
         "mean_weighted_f,evaluated_windows,skipped_windows,degradation_vs_default\n";
  for (const auto& rf : results) {
    const auto& r = rf.result;
    const auto& c = r.config;
    const bool moody = c.regime != Regime::All;
    std::optional<double> degradation;
    if (moody && all_f.count(c.delta) && all_f[c.delta] > 0.0) {
      degradation = (all_f[c.delta] - r.mean_f) / all_f[c.delta];
    }
    json e{{"tag", c.tag()},
           {"config_hash", config_hash(c)},
           {"delta", c.delta},
           {"regime", regime_keyword(c.regime)},
           {"mood", moody ? std::string(mood_keyword(c.mood)) : ""},
           {"variant", moody ? std::string(variant_keyword(c.variant)) : ""},
           {"mean_f", r.mean_f},
           {"min_f", r.min_f},
           {"max_f", r.max_f},
           {"mean_precision", r.mean_precision},
           {"mean_recall", r.mean_recall},
           {"mean_micro_f", r.mean_micro_f},
           {"mean_weighted_f", r.mean_weighted_f},
           {"evaluated_windows", r.windows.size()},
           {"skipped_windows", r.skipped.size()}};
    e["degradation_vs_default"] = degradation ? json(*degradation) : json(nullptr);
    agg.push_back(e);
    csv << c.tag() << ',' << c.delta << ',' << regime_keyword(c.regime) << ','
        << (moody ? mood_keyword(c.mood) : "") << ',' << (moody ? variant_keyword(c.variant) : "") << ','
        << num(r.mean_f) << ',' << num(r.min_f) << ',' << num(r.max_f) << ',' << num(r.mean_precision) << ','
        << num(r.mean_recall) << ',' << num(r.mean_micro_f) << ',' << num(r.mean_weighted_f) << ','
        << r.windows.size() << ',' << r.skipped.size() << ',' << (degradation ? num(*degradation) : "") << '\n';
  }
  dump(out_dir / "aggregate.json", agg.dump(1) + "\n");
  dump(out_dir / "aggregate.csv", csv.str());

  std::map<std::string, std::vector<ExperimentResult>> groups;
  for (const auto& rf : results) groups[group_of(rf.result.config)].push_back(rf.result);
  std::size_t saliency_files = 0;
  for (const auto& [group, members] : groups) {
    try {
      const auto entries = saliency_frequencies(members, a.top_k);
      dump(out_dir / ("saliency_" + group + ".csv"), saliency_csv(entries));
      ++saliency_files;
    } catch (const DataError&) {
      // every window in the group ran without selection
    }
  }

  fs::path labels_dir = a.labels;
  if (labels_dir.empty() && fs::exists(dir / "run.json")) {
    const json index = parse_json_file(dir / "run.json");
    labels_dir = index.value("labels", "");
  }
  bool wrote_corr = false;
  if (!labels_dir.empty() && fs::exists(labels_dir / "labels_raw.csv") && fs::exists(labels_dir / "labels_D.csv")) {
    const EmaHourly hourly = ema_of(read_label_csv(labels_dir / "labels_raw.csv"));
    const EmaHourly daily = ema_of(read_label_csv(labels_dir / "labels_D.csv"));
    dump(out_dir / "correlations.csv", correlation_csv(ema_correlations(hourly, daily)));
    wrote_corr = true;
  }
  out << "report: " << results.size() << " results, " << saliency_files << " saliency tables"
      << (wrote_corr ? ", correlations" : "") << " -> " << out_dir.string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Identify subjects from hourly smartphone telemetry and measure how mood changes that", "moodid"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed; required by synth and run");
  app.add_option("--jobs", g.jobs, "Worker threads for run")->check(CLI::Range(1u, 1024u));
  app.add_option("--config", g.config, "JSON config (run spec for run, scenario settings for synth)");
  app.set_version_flag("--version", kToolVersion);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset")->fallthrough();
  s->add_option("--scenario", synth.scenario, "Scenario name");
  s->add_option("-o,--out", synth.out, "Output directory")->required();
  s->add_option("--days", synth.days, "Override the number of days")->check(CLI::Range(2, 100000));
  s->add_option("--subjects", synth.subjects, "Override the number of subjects")->check(CLI::Range(2, 100000));

  FeaturizeArgs feat;
  auto* f = app.add_subcommand("featurize", "Build the hourly feature matrix")->fallthrough();
  f->add_option("--manifest", feat.manifest, "Dataset manifest")->required();
  f->add_option("-o,--out", feat.out, "Output directory")->required();
  f->add_option("--eps", feat.eps, "DBSCAN radius in degrees");
  f->add_option("--min-pts", feat.min_pts, "DBSCAN density threshold");

  LabelArgs lab;
  auto* l = app.add_subcommand("label", "Derive EMA mood labels")->fallthrough();
  l->add_option("--manifest", lab.manifest, "Dataset manifest")->required();
  l->add_option("--variant", lab.variant, "raw, H, D or all");
  l->add_option("-o,--out", lab.out, "Output directory")->required();

  auto* r = app.add_subcommand("run", "Run sliding-window experiments from a run spec (--config)")->fallthrough();

  ReportArgs rep;
  auto* p = app.add_subcommand("report", "Aggregate result files")->fallthrough();
  p->add_option("--results", rep.results, "Directory holding result_*.json")->required();
  p->add_option("-o,--out", rep.out, "Output directory (defaults to the results directory)");
  p->add_option("--labels", rep.labels, "Directory with labels_raw.csv and labels_D.csv");
  p->add_option("--top", rep.top_k, "Keep only the top entries of each saliency table");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (s->parsed()) return cmd_synth(g, synth, out);
    if (f->parsed()) return cmd_featurize(feat, out);
    if (l->parsed()) return cmd_label(lab, out);
    if (r->parsed()) return cmd_run(g, out, err);
    if (p->parsed()) return cmd_report(rep, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace moodid::cli
