#include <benchmark/benchmark.h>

#include "moodid/featurize.hpp"
#include "moodid/synthgen.hpp"

using namespace moodid;

static void BM_FeaturizePaperlike(benchmark::State& state) {
  const auto sc = make_scenario("paperlike", 1, 0, static_cast<int>(state.range(0)));
  const auto out = generate(sc.profiles, sc.days, 1);
  for (auto _ : state) benchmark::DoNotOptimize(featurize(out.events, out.window, out.subjects));
  state.counters["events"] = static_cast<double>(out.events.size());
}
BENCHMARK(BM_FeaturizePaperlike)->Arg(7)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_Synthesize(benchmark::State& state) {
  const auto sc = make_scenario("paperlike", 1, 0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(generate(sc.profiles, sc.days, 1));
}
BENCHMARK(BM_Synthesize)->Arg(7)->Unit(benchmark::kMillisecond);
