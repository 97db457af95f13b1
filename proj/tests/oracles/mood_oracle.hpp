#pragma once

// Mood rules written out as data: each mood is a list of alternatives, each
// alternative a list of (topic, test) conditions that must all hold. A
// condition on an absent topic fails.

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

enum Topic { kStress = 0, kMood = 1, kSleep = 2, kHappiness = 3, kSadness = 4 };

using Answers = std::array<std::optional<double>, 5>;

struct Condition {
  Topic topic;
  std::function<bool(double)> test;
};

using Alternative = std::vector<Condition>;

inline const std::array<std::vector<Alternative>, 3>& mood_table() {
  static const std::array<std::vector<Alternative>, 3> table = {{
      // happy
      {
          {{kSleep, [](double v) { return v == 1.0; }}},
          {{kStress, [](double v) { return v >= 4.0; }}},
          {{kHappiness, [](double v) { return v >= 2.0; }}},
          {{kMood, [](double v) { return v == 1.0; }}},
      },
      // upset
      {
          {{kStress, [](double v) { return v == 3.0; }}},
          {{kMood, [](double v) { return v == 3.0; }}, {kSleep, [](double v) { return v >= 3.0; }}},
          {{kSadness, [](double v) { return v >= 2.0; }}},
      },
      // stressed
      {
          {{kSleep, [](double v) { return v >= 3.0; }}},
          {{kStress, [](double v) { return v >= 1.0 && v <= 3.0; }}},
          {{kMood, [](double v) { return v == 2.0; }}},
      },
  }};
  return table;
}

/// {happy, upset, stressed}
inline std::array<bool, 3> classify(const Answers& a) {
  std::array<bool, 3> out{};
  for (std::size_t m = 0; m < 3; ++m) {
    for (const auto& alt : mood_table()[m]) {
      bool all = true;
      for (const auto& c : alt) {
        const auto& v = a[static_cast<std::size_t>(c.topic)];
        if (!v || !c.test(*v)) {
          all = false;
          break;
        }
      }
      if (all) {
        out[m] = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace oracle
