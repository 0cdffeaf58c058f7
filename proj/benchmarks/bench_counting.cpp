#include <benchmark/benchmark.h>

#include "liftgen/harness.hpp"

using namespace liftgen;

static void BM_WfomcForallExists(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Problem p = make_problem(parse_formula("forall x: exists y: R(x,y)"), n);
  for (auto _ : state) benchmark::DoNotOptimize(wfomc(p));
}
BENCHMARK(BM_WfomcForallExists)->RangeMultiplier(2)->Range(4, 64)->Unit(benchmark::kMillisecond);

static void BM_WfomcPreset(benchmark::State& state, const char* name) {
  Problem p = make_preset(name, static_cast<int>(state.range(0))).problem;
  for (auto _ : state) benchmark::DoNotOptimize(wfomc(p));
}
BENCHMARK_CAPTURE(BM_WfomcPreset, friends_smokers, "friends-smokers")->DenseRange(5, 20, 5)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_WfomcPreset, permutations, "permutations")->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_WfomcPreset, no_isolated, "no-isolated-vertices")->DenseRange(5, 20, 5)->Unit(benchmark::kMillisecond);
