#include <benchmark/benchmark.h>

#include <vector>

#include "mmdelay/channel.hpp"
#include "mmdelay/sim.hpp"

using namespace mmdelay;

static void BM_CapacitySample(benchmark::State& state) {
  const FadingLink link = FadingLink::from_db(85.0, 1000.0, 2.45, 3.0, 500.0);
  RandomSource rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(capacity_sample(link, rng));
}
BENCHMARK(BM_CapacitySample);

static void BM_NetworkServiceCurve(benchmark::State& state) {
  const auto horizon = static_cast<std::size_t>(state.range(0));
  RandomSource rng(2);
  const FadingLink link = FadingLink::from_db(80.0, 250.0, 2.45, 3.0, 500.0);
  std::vector<std::vector<double>> caps(4, std::vector<double>(horizon));
  for (auto& row : caps) {
    for (double& c : row) c = capacity_sample(link, rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(network_service_curve(caps).back());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(4 * horizon));
}
BENCHMARK(BM_NetworkServiceCurve)->Range(64, 4096);

static void BM_SimulateDelay(benchmark::State& state) {
  const TopologyConfig cfg = make_hybrid(4, 2, db_to_linear(85.0), 1000.0, LinkParams{}, 2.0);
  SimPlan plan;
  plan.horizon_slots = 500;
  plan.replications = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_delay(cfg, {1, 2, 4}, plan).front().exceedances);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateDelay)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
