#include <benchmark/benchmark.h>

#include <random>

#include "ordpick/mlcore.hpp"

using namespace ordpick;

namespace {

FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::uniform_real_distribution<double> value(-2.0, 2.0);
    FeatureMatrix m(rows, cols);
    for (double& v : m.values) v = value(rng);
    return m;
}

}  // namespace

static void BM_TreeTrain(benchmark::State& state) {
    std::mt19937_64 rng(1);
    auto rows = static_cast<std::size_t>(state.range(0));
    FeatureMatrix x = random_matrix(rng, rows, 60);
    std::vector<int> y;
    for (std::size_t i = 0; i < rows; ++i) y.push_back(static_cast<int>(rng() % 6));
    ModelSpec spec{ModelFamily::dt, DtParams{10, 2, SplitCriterion::gini}};
    for (auto _ : state) benchmark::DoNotOptimize(fit_model(spec, x, y, 6, 7));
}
BENCHMARK(BM_TreeTrain)->Arg(100)->Arg(300);

static void BM_MlpEpoch(benchmark::State& state) {
    std::mt19937_64 rng(2);
    FeatureMatrix x = random_matrix(rng, 256, 60);
    std::vector<int> y;
    for (std::size_t i = 0; i < 256; ++i) y.push_back(static_cast<int>(rng() % 6));
    ModelSpec spec{ModelFamily::mlp, MlpParams{32, 0.01, static_cast<int>(state.range(0)), 1e-4}};
    for (auto _ : state) benchmark::DoNotOptimize(fit_model(spec, x, y, 6, 7));
}
BENCHMARK(BM_MlpEpoch)->Arg(10)->Arg(50);

static void BM_KnnPredict(benchmark::State& state) {
    std::mt19937_64 rng(3);
    FeatureMatrix x = random_matrix(rng, 512, 60);
    std::vector<int> y;
    for (std::size_t i = 0; i < 512; ++i) y.push_back(static_cast<int>(rng() % 6));
    ModelSpec spec{ModelFamily::knn, KnnParams{7, KnnWeighting::uniform}};
    TrainedModel model = fit_model(spec, x, y, 6, 0);
    FeatureMatrix probe = random_matrix(rng, 64, 60);
    for (auto _ : state) benchmark::DoNotOptimize(predict(model, probe));
}
BENCHMARK(BM_KnnPredict);
