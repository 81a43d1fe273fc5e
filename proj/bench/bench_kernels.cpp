// Serial reference vs OpenMP paths of the two batch kernels.
//   prime_bench --benchmark_filter=Generate
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "prime/catalog.hpp"
#include "prime/generator.hpp"
#include "prime/harness.hpp"
#include "prime/metrics.hpp"

using namespace prime;

namespace {

const Catalog& catalog() {
  static const Catalog c = load_seed_catalog();
  return c;
}

BatchRequest request(int per_size) {
  BatchRequest req;
  req.sizes = {{2, 3}, {2, 4}, {4, 3}, {4, 4}};
  req.per_size = per_size;
  req.seed = 12345;
  return req;
}

void BM_Generate(benchmark::State& state, Exec exec) {
  const BatchRequest req = request(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(generate_batch(catalog(), req, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 4);
}

// Predictions from the uniform mock, so alignment and swaps do real work.
struct ScoreFixture {
  std::vector<PuzzleTriplet> triplets;
  std::vector<PredictedGrid> preds;
  std::vector<ScoreJob> jobs;

  explicit ScoreFixture(int per_size) : triplets(generate_batch(catalog(), request(per_size), Exec::parallel)) {
    for (const auto& t : triplets)
      for (Variant v : kAllVariants) preds.push_back(mock_solve(MockPolicy::uniform_random, t, v, 9));
    std::size_t i = 0;
    for (const auto& t : triplets)
      for (Variant v : kAllVariants)
        jobs.push_back({&preds[i++], &t.variant(v).grid, v == Variant::generic ? nullptr : &t.gender_tags});
  }
};

void BM_Score(benchmark::State& state, Exec exec) {
  static const ScoreFixture fx(126);
  for (auto _ : state) benchmark::DoNotOptimize(score_batch(fx.jobs, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(fx.jobs.size()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Generate, serial, Exec::serial)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Generate, openmp, Exec::parallel)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Score, serial, Exec::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Score, openmp, Exec::parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
