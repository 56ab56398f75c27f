#include <benchmark/benchmark.h>

#include "ordpick/featgen.hpp"

using namespace ordpick;

static void BM_EvaluateMatrix(benchmark::State& state) {
    GenConfig cfg;
    cfg.n_vars = 3;
    cfg.seed = 99;
    auto problems = generate_random_dataset(cfg, static_cast<int>(state.range(0)));
    DescriptorSet ds = generate_raw_descriptors(3);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_matrix(ds, problems));
    state.SetItemsProcessed(state.iterations() * state.range(0) *
                            static_cast<std::int64_t>(ds.size()));
}
BENCHMARK(BM_EvaluateMatrix)->Arg(32)->Arg(128);

static void BM_SimplifyDescriptors(benchmark::State& state) {
    GenConfig cfg;
    cfg.n_vars = 3;
    cfg.seed = 5;
    auto problems = generate_random_dataset(cfg, 128);
    DescriptorSet ds = generate_raw_descriptors(3);
    FeatureMatrix m = evaluate_matrix(ds, problems);
    for (auto _ : state) benchmark::DoNotOptimize(simplify_descriptors(ds, m));
}
BENCHMARK(BM_SimplifyDescriptors);
