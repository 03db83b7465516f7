#include <benchmark/benchmark.h>

#include "twave/particles.hpp"

namespace {

void BM_SimulatePower2(benchmark::State& state) {
  twave::ParticleSystemConfig c;
  c.n = static_cast<std::size_t>(state.range(0));
  c.mechanism = twave::Mechanism::Power2;
  c.jumps = twave::JumpLaw::exponential(1);
  c.horizon = 20;
  c.burn_in = 5;
  std::uint64_t events = 0;
  for (auto _ : state) {
    const auto r = twave::simulate(c);
    events += r.events;
    ++c.seed;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_SimulatePower2)->Arg(1'000)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_SimulateBS(benchmark::State& state) {
  twave::ParticleSystemConfig c;
  c.n = 10'000;
  c.mechanism = twave::Mechanism::BSModel;
  c.jump_rate = 1.0;
  c.jumps = twave::JumpLaw::exponential(1);
  c.horizon = 20;
  c.burn_in = 5;
  std::uint64_t events = 0;
  for (auto _ : state) {
    events += twave::simulate(c).events;
    ++c.seed;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}
BENCHMARK(BM_SimulateBS)->Unit(benchmark::kMillisecond);

}  // namespace
