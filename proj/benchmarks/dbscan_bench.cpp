#include <benchmark/benchmark.h>

#include "moodid/dbscan.hpp"
#include "moodid/rng.hpp"

using namespace moodid;

static void BM_Dbscan(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(42);
  std::vector<GeoPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(rng.below(20));
    pts.push_back({43.70 + c * 0.01 + rng.normal(0, 0.002), -72.29 + rng.normal(0, 0.002)});
  }
  const DbscanParams params{0.003, 5};
  for (auto _ : state) benchmark::DoNotOptimize(dbscan(pts, params));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_Dbscan)->RangeMultiplier(4)->Range(256, 16384)->Complexity();
