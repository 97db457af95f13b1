#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace moodid {

/// Bad or inconsistent input data (malformed files, stale inputs, unusable windows).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A row that could not be parsed. The message names the file and 1-based line.
class ParseError : public DataError {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Every invariant violation found while loading, collected before throwing.
class ValidationError : public DataError {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : DataError(summarize(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string summarize(const std::vector<std::string>& problems) {
    std::string out = std::to_string(problems.size()) + " invalid event(s)";
    const std::size_t shown = problems.size() < 5 ? problems.size() : 5;
    for (std::size_t i = 0; i < shown; ++i) out += "\n  " + problems[i];
    if (shown < problems.size()) out += "\n  ...";
    return out;
  }

  std::vector<std::string> problems_;
};

}  // namespace moodid
