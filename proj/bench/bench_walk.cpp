// Parallel kernel against the serial reference on the same batches.

#include <benchmark/benchmark.h>

#include "walkbound/config.hpp"
#include "walkbound/parallel.hpp"
#include "walkbound/walk.hpp"

using namespace walkbound;

namespace {

const Model& model(int which) {
  static const Model srw = build_model(parse_config_text(R"(
group.rank = 2
measure.atoms = ["a", "A", "b", "B"]
)"));
  static const Model linear = build_model(parse_config_text(R"(
group.rank = 2
group.acting = Z
group.theta = ["alpha"]
auto.alpha.b = "ab"
auto.alpha.inv.b = "Ab"
measure.atoms = ["a|0", "A|0", "b|0", "B|0", "1|1", "1|-1"]
)"));
  return which == 0 ? srw : linear;
}

void BM_parallel(benchmark::State& state) {
  const auto& m = model(static_cast<int>(state.range(0)));
  const auto steps = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    auto batch = sample_paths(m.group, m.measure, 7, 256, steps);
    benchmark::DoNotOptimize(batch.final_positions.data());
  }
  state.SetItemsProcessed(state.iterations() * 256 * state.range(1));
  state.counters["workers"] = worker_count();
}

void BM_reference(benchmark::State& state) {
  const auto& m = model(static_cast<int>(state.range(0)));
  const auto steps = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    auto batch = reference::sample_paths(m.group, m.measure, 7, 256, steps);
    benchmark::DoNotOptimize(batch.final_positions.data());
  }
  state.SetItemsProcessed(state.iterations() * 256 * state.range(1));
}

// range(0): 0 = simple random walk on F_2, 1 = F_2 x| Z with b -> ab.
BENCHMARK(BM_parallel)->ArgsProduct({{0, 1}, {200, 1000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reference)->ArgsProduct({{0, 1}, {200, 1000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
