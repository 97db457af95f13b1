#include "moodid/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace moodid {

namespace {

constexpr int kUnvisited = -2;

// Uniform grid with cells slightly wider than eps, so every neighbour of a
// point lies in the 3x3 block around its cell.
class GridIndex {
 public:
  GridIndex(std::span<const GeoPoint> points, double eps)
      : points_(points), eps2_(eps * eps), cell_(eps * (1.0 + 1e-9)) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[key(cell_of(points[i].lat), cell_of(points[i].lon))].push_back(i);
    }
  }

  /// Neighbours of point i (including i), ascending by index.
  void query(std::size_t i, std::vector<std::size_t>& out) const {
    out.clear();
    const GeoPoint& p = points_[i];
    const std::int64_t cx = cell_of(p.lat);
    const std::int64_t cy = cell_of(p.lon);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t j : it->second) {
          const double a = points_[j].lat - p.lat;
          const double b = points_[j].lon - p.lon;
          if (a * a + b * b <= eps2_) out.push_back(j);
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

  static std::uint64_t key(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffULL);
  }

  std::span<const GeoPoint> points_;
  double eps2_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace

std::vector<int> dbscan(std::span<const GeoPoint> points, const DbscanParams& params) {
  if (!(params.eps > 0.0)) throw std::invalid_argument("dbscan: eps must be positive");
  if (params.min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be at least 1");

  const std::size_t n = points.size();
  std::vector<int> labels(n, kUnvisited);
  const GridIndex index(points, params.eps);

  std::vector<std::size_t> neighbours;
  std::vector<std::size_t> frontier;
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    index.query(i, neighbours);
    if (neighbours.size() < params.min_pts) {
      labels[i] = kNoise;
      continue;
    }
    // Points are labelled when queued, so each enters the frontier once.
    labels[i] = cluster;
    frontier.assign(1, i);
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const std::size_t q = frontier[head];
      if (head > 0) {
        index.query(q, neighbours);
        if (neighbours.size() < params.min_pts) continue;
      }
      for (std::size_t j : neighbours) {
        if (labels[j] == kNoise) {
          labels[j] = cluster;
        } else if (labels[j] == kUnvisited) {
          labels[j] = cluster;
          frontier.push_back(j);
        }
      }
    }
    ++cluster;
  }
  return labels;
}

}  // namespace moodid
