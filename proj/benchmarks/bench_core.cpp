#include <benchmark/benchmark.h>

#include <complex>

#include "rslab/double_sine.hpp"

using rslab::cplx;
using rslab::Periods;

namespace {

void BM_DoubleSineStrip(benchmark::State& state) {
  const Periods w(cplx(1.0, 0.0), cplx(1.36, 0.0));
  const cplx z(0.63, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rslab::double_sine(z, w));
  }
}
BENCHMARK(BM_DoubleSineStrip);

void BM_DoubleSineShifted(benchmark::State& state) {
  // argument `range` periods away from the strip, exercising the reduction
  const Periods w(cplx(1.0, 0.0), cplx(1.36, 0.0));
  const double off = static_cast<double>(state.range(0));
  const cplx z(0.63 + off, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rslab::double_sine(z, w));
  }
}
BENCHMARK(BM_DoubleSineShifted)->RangeMultiplier(2)->Range(1, 16);

void BM_DoubleSineOscillatory(benchmark::State& state) {
  // large imaginary part below the asymptotic cutoff: the worst case
  const Periods w(cplx(1.0, 0.0), cplx(1.36, 0.0));
  const cplx z(0.63, 4.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rslab::double_sine(z, w));
  }
}
BENCHMARK(BM_DoubleSineOscillatory);

}  // namespace

BENCHMARK_MAIN();
