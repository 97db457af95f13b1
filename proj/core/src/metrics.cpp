#include "moodid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace moodid {

double precision(std::size_t tp, std::size_t fp) {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall(std::size_t tp, std::size_t fn) {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double f_score(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double p = precision(tp, fp);
  const double r = recall(tp, fn);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double macro_f(std::span<const ClassCounts> per_class) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : per_class) {
    if (c.support == 0) continue;
    sum += f_score(c.tp, c.fp, c.fn);
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

ClassificationReport evaluate(std::span<const SubjectId> truth, std::span<const SubjectId> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("evaluate: length mismatch");
  std::map<SubjectId, ClassCounts> counts;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto& t = counts[truth[i]];
    t.subject = truth[i];
    ++t.support;
    if (truth[i] == predicted[i]) {
      ++t.tp;
      ++correct;
    } else {
      ++t.fn;
      auto& p = counts[predicted[i]];
      p.subject = predicted[i];
      ++p.fp;
    }
  }

  ClassificationReport r;
  std::size_t tp = 0, fp = 0, fn = 0, present = 0, support = 0;
  double weighted = 0.0;
  for (const auto& [id, c] : counts) {
    r.per_class.push_back(c);
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
    if (c.support == 0) continue;
    ++present;
    support += c.support;
    const double f = f_score(c.tp, c.fp, c.fn);
    r.macro_precision += precision(c.tp, c.fp);
    r.macro_recall += recall(c.tp, c.fn);
    weighted += f * static_cast<double>(c.support);
  }
  r.macro_f = macro_f(r.per_class);
  if (present) {
    r.macro_precision /= static_cast<double>(present);
    r.macro_recall /= static_cast<double>(present);
  }
  r.weighted_f = support ? weighted / static_cast<double>(support) : 0.0;
  r.micro_f = f_score(tp, fp, fn);
  r.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
  return r;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) return std::nullopt;
  // Single-pass co-moment update.
  double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    mx += dx / n;
    my += dy / n;
    sxx += dx * (x[i] - mx);
    syy += dy * (y[i] - my);
    sxy += dx * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace moodid
