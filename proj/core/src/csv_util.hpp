#pragma once

// Small locale-independent helpers for the flat-file formats.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <utility>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace moodid::detail {

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

std::optional<std::int64_t> parse_i64(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Shortest decimal form that round-trips; always '.' as separator.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Line iterator that strips a trailing '\r' and counts 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);

  bool next(std::string& line);
  std::size_t line_number() const { return line_no_; }
  const std::string& name() const { return name_; }

 private:
  std::ifstream in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

}  // namespace moodid::detail

namespace moodid::detail {

/// "# key=value" -> {key, value}; nullopt for other lines.
std::optional<std::pair<std::string, std::string>> parse_tag_line(std::string_view line);
std::string format_tags(const std::map<std::string, std::string>& tags);

}  // namespace moodid::detail
