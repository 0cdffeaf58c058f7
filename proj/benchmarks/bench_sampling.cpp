#include <benchmark/benchmark.h>

#include "liftgen/harness.hpp"

using namespace liftgen;

// Setup (counting tables) and first sample, cold.
static void BM_SamplerCold(benchmark::State& state, const char* name) {
  Problem p = make_preset(name, static_cast<int>(state.range(0))).problem;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Sampler sampler(p);
    RandomSource rng(seed++);
    benchmark::DoNotOptimize(sampler.sample_structure(rng));
  }
}
BENCHMARK_CAPTURE(BM_SamplerCold, friends_smokers, "friends-smokers")->DenseRange(5, 20, 5)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SamplerCold, derangements, "derangements")->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

// Per-sample cost once the caches are warm.
static void BM_SamplerWarm(benchmark::State& state, const char* name) {
  Sampler sampler(make_preset(name, static_cast<int>(state.range(0))).problem);
  RandomSource rng(1);
  for (int i = 0; i < 100; ++i) sampler.sample_structure(rng);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample_structure(rng));
}
BENCHMARK_CAPTURE(BM_SamplerWarm, friends_smokers, "friends-smokers")->DenseRange(5, 20, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_SamplerWarm, two_colored, "two-colored-graphs")->DenseRange(5, 20, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_SamplerWarm, functions, "functions")->DenseRange(4, 10, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
