#include <benchmark/benchmark.h>

#include <cmath>

#include "musob/measure.hpp"
#include "musob/tangent.hpp"

namespace {

musob::MeasurePtr fat_cantor(int depth) {
  return musob::make_measure(musob::fat_cantor_density({0.0, 1.0}, 1.0, depth, 0.5));
}

void BM_IntegrateSmooth(benchmark::State& state) {
  const auto m = fat_cantor(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(musob::integrate([](double x) { return std::sin(5.0 * x); }, *m));
  }
}
BENCHMARK(BM_IntegrateSmooth)->DenseRange(1, 4, 1);

void BM_Quantize(benchmark::State& state) {
  const auto m = fat_cantor(3);
  for (auto _ : state) benchmark::DoNotOptimize(musob::quantize(m, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Quantize)->RangeMultiplier(8)->Range(8, 4096);

void BM_TangentField(benchmark::State& state) {
  const auto m = fat_cantor(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(musob::tangent_field(m));
}
BENCHMARK(BM_TangentField)->DenseRange(1, 4, 1);

}  // namespace
