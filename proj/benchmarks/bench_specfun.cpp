#include <benchmark/benchmark.h>

#include <vector>

#include "mmdelay/calculus.hpp"
#include "mmdelay/channel.hpp"
#include "mmdelay/specfun.hpp"

using namespace mmdelay;

static void BM_KummerU(benchmark::State& state) {
  // z spans the small-SNR and large-SNR ends of the operating range.
  const double z = state.range(0) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(kummer_u(3.0, 4.0 - 1.4427, z));
}
BENCHMARK(BM_KummerU)->Arg(1)->Arg(100)->Arg(2237)->Arg(1000000);

static void BM_MgfOracle(benchmark::State& state) {
  const FadingLink link = FadingLink::from_db(85.0, 1000.0, 2.45, 3.0, 500.0);
  for (auto _ : state) benchmark::DoNotOptimize(mgf_oracle(link, 1.4427));
}
BENCHMARK(BM_MgfOracle);

static void BM_Hyp2f1NearBoundary(benchmark::State& state) {
  const double z = 1.0 - 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hyp2f1_row1(13.0, 11.0, z));
}
BENCHMARK(BM_Hyp2f1NearBoundary)->Arg(10)->Arg(1000)->Arg(100000);

static void BM_CompositionTail(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::vector<double> xs(k);
  for (std::size_t i = 0; i < k; ++i) xs[i] = 0.5 + 0.4 * static_cast<double>(i) / static_cast<double>(k);
  for (auto _ : state) benchmark::DoNotOptimize(log_composition_tail_sum(xs, 20));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CompositionTail)->RangeMultiplier(2)->Range(1, 16)->Complexity();
