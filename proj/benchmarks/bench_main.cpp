#include <benchmark/benchmark.h>

#include "edgevid/cache.hpp"
#include "edgevid/config.hpp"
#include "edgevid/engine.hpp"
#include "edgevid/instances.hpp"
#include "edgevid/offline.hpp"
#include "edgevid/workload.hpp"

using namespace edgevid;

namespace {

// Zipf-skewed insert/touch mix against a cache holding ~20% of the library.
void BM_LruInsert(benchmark::State& state) {
  const Catalog catalog = default_catalog();
  const ZipfSampler zipf(catalog.num_videos(), 0.8);
  LruCache cache(catalog.library_size() / 5);
  RandomStream rng(7);
  for (auto _ : state) {
    const VariantId v{zipf.sample(rng), rng.between(1, catalog.num_levels())};
    if (!cache.touch(v)) benchmark::DoNotOptimize(cache.insert_lru(v, catalog.variant_size(v.level)));
  }
}
BENCHMARK(BM_LruInsert);

void BM_BnbRandomInstance(benchmark::State& state) {
  InstanceLimits limits;
  limits.max_requests = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    state.PauseTiming();
    const SchedulingInstance inst = random_instance(seed++, limits);
    state.ResumeTiming();
    benchmark::DoNotOptimize(solve_bnb(inst).objective);
  }
}
BENCHMARK(BM_BnbRandomInstance)->Arg(6)->Arg(12)->Arg(24);

// One full run at the reference parameters with a shortened trace.
void BM_EngineRun(benchmark::State& state) {
  ExperimentConfig c;
  c.requests_per_server = static_cast<int>(state.range(1));
  RunConfig rc = make_run_config(c, static_cast<PolicyKind>(state.range(0)), 1);
  rc.check_invariants = false;
  for (auto _ : state) benchmark::DoNotOptimize(run(rc).metrics.total_backhaul_cost);
  state.SetItemsProcessed(state.iterations() * 3 * state.range(1));
}
BENCHMARK(BM_EngineRun)
    ->Args({static_cast<int>(PolicyKind::jccp), 2000})
    ->Args({static_cast<int>(PolicyKind::offline), 2000})
    ->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
