#include <benchmark/benchmark.h>

#include "twave/increment.hpp"
#include "twave/rng.hpp"

namespace {

void BM_Philox(benchmark::State& state) {
  twave::RngStream rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rng());
}
BENCHMARK(BM_Philox);

void BM_Exponential(benchmark::State& state) {
  twave::RngStream rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(twave::exponential(rng, 1.0));
}
BENCHMARK(BM_Exponential);

void BM_SampleA_CompoundPoisson(benchmark::State& state) {
  const auto inc = twave::IncrementLaw::sync(
      twave::LevySpec::compound_poisson(1.0, twave::JumpLaw::exponential(1)), 4.5);
  twave::RngStream rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(twave::sample_A(inc, rng));
}
BENCHMARK(BM_SampleA_CompoundPoisson);

void BM_SampleY_Gamma(benchmark::State& state) {
  const auto inc = twave::IncrementLaw::power2(twave::JumpLaw::gamma(2, 2), 1.0);
  twave::RngStream rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(twave::sample_Y(inc, rng));
}
BENCHMARK(BM_SampleY_Gamma);

}  // namespace
