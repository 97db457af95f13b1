#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

inline double precision(double tp, double fp) { return tp + fp == 0 ? 0.0 : tp / (tp + fp); }
inline double recall(double tp, double fn) { return tp + fn == 0 ? 0.0 : tp / (tp + fn); }

/// F written directly in counts: 2tp / (2tp + fp + fn).
inline double f_score(double tp, double fp, double fn) {
  const double d = 2 * tp + fp + fn;
  return d == 0 || tp == 0 ? 0.0 : 2 * tp / d;
}

/// Two-pass covariance over standard deviations.
inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
