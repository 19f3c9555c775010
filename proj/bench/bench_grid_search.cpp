// Serial reference vs OpenMP grid search on the default thermal bench.

#include <benchmark/benchmark.h>

#include "arx/scenario.hpp"
#include "arx/selection.hpp"

namespace {

struct Bench {
  arx::IdentDataset train;
  arx::IdentDataset validate;
};

const Bench& bench() {
  static const Bench b = [] {
    auto sc = arx::Scenario::default_bench();
    sc.noise_fraction = 0.05;
    const auto d = arx::generate(sc);
    auto [train, pre] = arx::preprocess(d.train, arx::Preprocessing::scalar(25.0));
    return Bench{train, arx::apply_preprocessing(d.validate, pre)};
  }();
  return b;
}

void run(benchmark::State& state, arx::Execution exec) {
  const auto& b = bench();
  arx::SearchSpace space;
  space.na_max = static_cast<int>(state.range(0));
  space.nb_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = arx::grid_search(b.train, b.validate, space, arx::Criterion::aic, exec);
    benchmark::DoNotOptimize(r.winner);
  }
  state.counters["candidates"] = static_cast<double>(space.enumerate(1).size());
}

void BM_GridSearchSerial(benchmark::State& state) { run(state, arx::Execution::serial); }
void BM_GridSearchParallel(benchmark::State& state) { run(state, arx::Execution::parallel); }

BENCHMARK(BM_GridSearchSerial)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSearchParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
