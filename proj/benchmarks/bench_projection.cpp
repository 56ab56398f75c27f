#include <benchmark/benchmark.h>

#include <random>

#include "ordpick/projection.hpp"

using namespace ordpick;

namespace {

std::vector<PolySystem> bench_systems(int n_vars, int count) {
    GenConfig cfg;
    cfg.n_vars = n_vars;
    cfg.seed = 1234;
    return generate_random_dataset(cfg, count);
}

}  // namespace

static void BM_Resultant(benchmark::State& state) {
    auto deg = static_cast<int>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> exponent(0, deg), coeff(-50, 50);
    auto random_poly = [&] {
        while (true) {
            std::vector<Monomial> terms;
            for (int t = 0; t < 4; ++t) {
                Monomial m;
                m.exponents = {exponent(rng), exponent(rng)};
                m.coefficient = coeff(rng);
                terms.push_back(std::move(m));
            }
            terms.push_back(Monomial{{deg, 0}, 1});  // pin degree in x1
            Polynomial p(std::move(terms));
            if (p.degree_in(0) == deg) return p;
        }
    };
    std::vector<std::pair<Polynomial, Polynomial>> pairs;
    for (int i = 0; i < 32; ++i) pairs.emplace_back(random_poly(), random_poly());
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [p, q] = pairs[i++ % pairs.size()];
        benchmark::DoNotOptimize(resultant(p, q, 0));
    }
}
BENCHMARK(BM_Resultant)->Arg(2)->Arg(3)->Arg(4);

static void BM_SotdChoose(benchmark::State& state) {
    auto systems = bench_systems(static_cast<int>(state.range(0)), 32);
    ProjectionCaps caps;
    std::size_t i = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sotd_choose(systems[i++ % systems.size()], caps));
}
BENCHMARK(BM_SotdChoose)->Arg(2)->Arg(3)->Arg(4);

static void BM_BrownChoose(benchmark::State& state) {
    auto systems = bench_systems(static_cast<int>(state.range(0)), 32);
    std::size_t i = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(brown_choose(systems[i++ % systems.size()]));
}
BENCHMARK(BM_BrownChoose)->Arg(3)->Arg(5);
