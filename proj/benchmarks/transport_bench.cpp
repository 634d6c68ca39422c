#include <benchmark/benchmark.h>

#include "musob/transport.hpp"

namespace {

musob::CostConfig minus_identity() {
  musob::CostConfig c;
  c.gradient = musob::CostConfig::Gradient::squared_minus_identity;
  return c;
}

void BM_SolveDp(benchmark::State& state) {
  const auto inst = musob::random_instance(static_cast<std::size_t>(state.range(0)), 1, minus_identity());
  for (auto _ : state) benchmark::DoNotOptimize(musob::solve_dp(inst));
}
BENCHMARK(BM_SolveDp)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

void BM_SolveBrute(benchmark::State& state) {
  const auto inst = musob::random_instance(static_cast<std::size_t>(state.range(0)), 1, minus_identity());
  for (auto _ : state) benchmark::DoNotOptimize(musob::solve_brute(inst));
}
BENCHMARK(BM_SolveBrute)->DenseRange(6, 8, 1)->Unit(benchmark::kMillisecond);

void BM_SolveLocal(benchmark::State& state) {
  const auto inst = musob::random_instance(static_cast<std::size_t>(state.range(0)), 1, minus_identity());
  musob::LocalSearchOptions options;
  options.iters = 20000;
  for (auto _ : state) benchmark::DoNotOptimize(musob::solve_local(inst, options));
}
BENCHMARK(BM_SolveLocal)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

}  // namespace
