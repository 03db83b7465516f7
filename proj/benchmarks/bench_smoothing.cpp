#include <benchmark/benchmark.h>

#include <vector>

#include "twave/smoothing.hpp"

namespace {

void BM_PoolStep(benchmark::State& state) {
  const auto inc = twave::IncrementLaw::power2(twave::JumpLaw::exponential(1), 0.0);
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::vector<double> pool(m, 1.0);
  std::uint64_t tag = 0;
  for (auto _ : state) {
    auto next = twave::pool_step(pool, inc, 1.0, 2, m, 1, tag++);
    benchmark::DoNotOptimize(next.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}
BENCHMARK(BM_PoolStep)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace
