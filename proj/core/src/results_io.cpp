#include "moodid/results_io.hpp"

#include <sstream>

#include "csv_util.hpp"
#include "json.hpp"

namespace moodid {

using json = nlohmann::ordered_json;
using detail::format_double;

std::string window_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "window_index,window_start_hour,train_size,test_size,train_subjects,test_subjects,"
         "f_score,precision,recall,micro_f,weighted_f,selected,selection_disabled,skip_reason\n";
  for (const auto& w : result.windows) {
    out << w.window_index << ',' << w.window_start_hour << ',' << w.train_size << ',' << w.test_size << ','
        << w.train_subjects << ',' << w.test_subjects << ',' << format_double(w.f_score) << ','
        << format_double(w.precision) << ',' << format_double(w.recall) << ',' << format_double(w.micro_f)
        << ',' << format_double(w.weighted_f) << ',' << w.selected_columns.size() << ','
        << (w.selection_disabled ? 1 : 0) << ",\n";
  }
  for (const auto& s : result.skipped) {
    out << s.window_index << ',' << s.window_start_hour << ",,,,,,,,,,,," << s.reason << '\n';
  }
  return out.str();
}

void write_window_csv(const std::filesystem::path& path, const ExperimentResult& result) {
  detail::write_file(path, window_csv(result));
}

std::string result_json(const ResultFile& file) {
  const auto& r = file.result;
  json j;
  j["format"] = "moodid-result/1";
  j["tag"] = r.config.tag();
  j["config_hash"] = config_hash(r.config);
  j["config"] = json::parse(config_json(r.config));
  j["provenance"] = json::object();
  for (const auto& [k, v] : file.provenance) j["provenance"][k] = v;
  j["summary"] = json{{"evaluated_windows", r.windows.size()},
                      {"skipped_windows", r.skipped.size()},
                      {"mean_f", r.mean_f},
                      {"min_f", r.min_f},
                      {"max_f", r.max_f},
                      {"mean_precision", r.mean_precision},
                      {"mean_recall", r.mean_recall},
                      {"mean_micro_f", r.mean_micro_f},
                      {"mean_weighted_f", r.mean_weighted_f}};
  j["columns"] = r.columns;
  json windows = json::array();
  for (const auto& w : r.windows) {
    windows.push_back(json{{"window_index", w.window_index},
                           {"window_start_hour", w.window_start_hour},
                           {"train_size", w.train_size},
                           {"test_size", w.test_size},
                           {"train_subjects", w.train_subjects},
                           {"test_subjects", w.test_subjects},
                           {"f_score", w.f_score},
                           {"precision", w.precision},
                           {"recall", w.recall},
                           {"micro_f", w.micro_f},
                           {"weighted_f", w.weighted_f},
                           {"selection_disabled", w.selection_disabled},
                           {"selected_columns", w.selected_columns}});
  }
  j["windows"] = std::move(windows);
  json skipped = json::array();
  for (const auto& s : r.skipped) {
    skipped.push_back(json{{"window_index", s.window_index},
                           {"window_start_hour", s.window_start_hour},
                           {"reason", s.reason}});
  }
  j["skipped"] = std::move(skipped);
  return j.dump(1) + "\n";
}

ResultFile result_from_json(std::string_view text) {
  ResultFile file;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "moodid-result/1") throw DataError("unsupported result format");
    auto& r = file.result;
    r.config = config_from_json(j.at("config").dump());
    for (const auto& [k, v] : j.at("provenance").items()) file.provenance[k] = v.get<std::string>();
    const auto& s = j.at("summary");
    r.mean_f = s.at("mean_f").get<double>();
    r.min_f = s.at("min_f").get<double>();
    r.max_f = s.at("max_f").get<double>();
    r.mean_precision = s.at("mean_precision").get<double>();
    r.mean_recall = s.at("mean_recall").get<double>();
    r.mean_micro_f = s.at("mean_micro_f").get<double>();
    r.mean_weighted_f = s.at("mean_weighted_f").get<double>();
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& w : j.at("windows")) {
      WindowRecord rec;
      rec.window_index = w.at("window_index").get<std::size_t>();
      rec.window_start_hour = w.at("window_start_hour").get<std::int64_t>();
      rec.train_size = w.at("train_size").get<std::size_t>();
      rec.test_size = w.at("test_size").get<std::size_t>();
      rec.train_subjects = w.at("train_subjects").get<std::size_t>();
      rec.test_subjects = w.at("test_subjects").get<std::size_t>();
      rec.f_score = w.at("f_score").get<double>();
      rec.precision = w.at("precision").get<double>();
      rec.recall = w.at("recall").get<double>();
      rec.micro_f = w.at("micro_f").get<double>();
      rec.weighted_f = w.at("weighted_f").get<double>();
      rec.selection_disabled = w.at("selection_disabled").get<bool>();
      rec.selected_columns = w.at("selected_columns").get<std::vector<std::size_t>>();
      for (std::size_t c : rec.selected_columns) {
        if (c >= r.columns.size()) throw DataError("selected column index out of range");
      }
      r.windows.push_back(std::move(rec));
    }
    for (const auto& s2 : j.at("skipped")) {
      r.skipped.push_back(SkippedWindow{s2.at("window_index").get<std::size_t>(),
                                        s2.at("window_start_hour").get<std::int64_t>(),
                                        s2.at("reason").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed result file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed result config: ") + e.what());
  }
  return file;
}

void write_result_json(const std::filesystem::path& path, const ResultFile& file) {
  detail::write_file(path, result_json(file));
}

ResultFile read_result_json(const std::filesystem::path& path) {
  try {
    return result_from_json(detail::read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string saliency_csv(std::span<const SaliencyEntry> entries) {
  std::ostringstream out;
  out << "rank,feature,count,frequency\n";
  std::size_t rank = 1;
  for (const auto& e : entries) {
    out << rank++ << ',' << e.feature << ',' << e.count << ',' << format_double(e.frequency) << '\n';
  }
  return out.str();
}

std::string correlation_csv(const CorrelationMatrix& m) {
  std::ostringstream out;
  out << "variable";
  for (const auto& n : m.names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << m.names[i];
    for (std::size_t j = 0; j < m.size(); ++j) {
      const auto& v = m.at(i, j);
      out << ',' << (v ? format_double(*v) : std::string("NA"));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace moodid
