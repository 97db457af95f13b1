#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace moodid {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

inline constexpr int kNoise = -1;

/// Defaults follow the common library defaults: eps 0.5 and a minimum of five
/// samples per neighbourhood (the point itself included). Distances are
/// Euclidean on raw degrees.
struct DbscanParams {
  double eps = 0.5;
  std::size_t min_pts = 5;
};

/// Density-based clustering. Returns one label per point: a cluster id >= 0
/// or kNoise. Clusters are numbered in the order their first core point
/// appears in the input, and a border point belongs to the first cluster that
/// reaches it. Two points are neighbours when their distance is <= eps.
std::vector<int> dbscan(std::span<const GeoPoint> points, const DbscanParams& params = {});

}  // namespace moodid
