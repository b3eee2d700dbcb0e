#include <benchmark/benchmark.h>

#include "mmdelay/effcap.hpp"
#include "mmdelay/schemes.hpp"

using namespace mmdelay;

namespace {
const LinkParams kParams{};
}

// Fresh evaluator each iteration, so MGF factors are recomputed.
static void BM_HybridBoundCold(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const TopologyConfig cfg = make_hybrid(12, m, db_to_linear(85.0), 1000.0, kParams, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(hybrid_bound(cfg, 10).probability);
}
BENCHMARK(BM_HybridBoundCold)->Arg(1)->Arg(3)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_HybridBoundWarm(benchmark::State& state) {
  BoundEvaluator ev(make_hybrid(12, 3, db_to_linear(85.0), 1000.0, kParams, 4.0));
  ev.evaluate(10);
  for (auto _ : state) benchmark::DoNotOptimize(ev.evaluate(10).probability);
}
BENCHMARK(BM_HybridBoundWarm)->Unit(benchmark::kMicrosecond);

static void BM_HeterogeneousTandem(benchmark::State& state) {
  TopologyConfig cfg;
  cfg.kind = TopologyKind::densification;
  PathSpec path;
  for (int j = 0; j < state.range(0); ++j) path.hops.push_back(kParams.make(db_to_linear(80.0 + j % 3), 1000.0 / state.range(0)));
  cfg.paths.push_back(path);
  cfg.arrival.rate = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(densification_bound(cfg, 10).probability);
}
BENCHMARK(BM_HeterogeneousTandem)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_InvertDelay(benchmark::State& state) {
  const TopologyConfig cfg = make_hybrid(12, 3, db_to_linear(85.0), 1000.0, kParams, 7.0);
  for (auto _ : state) benchmark::DoNotOptimize(invert_delay(cfg, 1e-3));
}
BENCHMARK(BM_InvertDelay)->Unit(benchmark::kMillisecond);

static void BM_PathCountScan(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(scan_path_count(12, db_to_linear(75.0), 1000.0, 2.0, kParams).argmax_lower);
}
BENCHMARK(BM_PathCountScan)->Unit(benchmark::kMicrosecond);
