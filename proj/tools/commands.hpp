#pragma once

// Stage-per-command driver: synth -> featurize -> label -> run -> report.
// Each stage reads the files written by the previous one.

#include <ostream>
#include <string>
#include <vector>

namespace moodid::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moodid::cli
