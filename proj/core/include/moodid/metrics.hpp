#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "moodid/types.hpp"

namespace moodid {

/// tp / (tp + fp); 0 when nothing was predicted positive.
double precision(std::size_t tp, std::size_t fp);
/// tp / (tp + fn); 0 when there were no positives.
double recall(std::size_t tp, std::size_t fn);
/// Harmonic mean of precision and recall; 0 when both are 0.
double f_score(std::size_t tp, std::size_t fp, std::size_t fn);

struct ClassCounts {
  SubjectId subject;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  /// Occurrences in the ground truth.
  std::size_t support = 0;
};

struct ClassificationReport {
  /// Every subject seen in truth or predictions, ascending.
  std::vector<ClassCounts> per_class;
  /// Unweighted means over subjects with support > 0.
  double macro_f = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  /// Pooled counts; equals accuracy for single-label predictions.
  double micro_f = 0.0;
  /// Support-weighted mean of per-subject F.
  double weighted_f = 0.0;
  double accuracy = 0.0;
};

/// Mean of per-class F over classes with support > 0.
double macro_f(std::span<const ClassCounts> per_class);

ClassificationReport evaluate(std::span<const SubjectId> truth, std::span<const SubjectId> predicted);

/// Pearson correlation, or nullopt with fewer than two pairs or zero variance
/// on either side.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

}  // namespace moodid
