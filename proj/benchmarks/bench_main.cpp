#include <benchmark/benchmark.h>

#include "r2r/chain.hpp"
#include "r2r/coupling.hpp"
#include "r2r/deck.hpp"
#include "r2r/montecarlo.hpp"
#include "r2r/tv_exact.hpp"

namespace {

void BM_ApplyShuffle(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    r2r::Xoshiro256StarStar rng(1);
    std::vector<r2r::Card> order = r2r::Deck::identity(n).order();
    for (auto _ : state) {
        r2r::apply_shuffle_inplace(order, r2r::random_shuffle(rng, n));
        benchmark::DoNotOptimize(order.data());
    }
}
BENCHMARK(BM_ApplyShuffle)->Arg(8)->Arg(52)->Arg(256);

void BM_QueueOnlyTrajectory(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int k = static_cast<int>(2.0 * n * std::log(n)) + 1;
    const r2r::SeedSpec seed{7};
    std::uint64_t i = 0;
    for (auto _ : state) {
        r2r::Xoshiro256StarStar rng = seed.stream(i++);
        r2r::GoodTimeScanner scanner(n, {1, 2}, {});
        for (int t = 0; t < k; ++t) scanner.feed(r2r::random_shuffle(rng, n));
        benchmark::DoNotOptimize(scanner.last_good());
    }
    state.SetItemsProcessed(state.iterations() * k);
}
BENCHMARK(BM_QueueOnlyTrajectory)->Arg(50)->Arg(200);

void BM_CoupledRun(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int k = 8 * n;
    const r2r::SeedSpec seed{11};
    std::uint64_t i = 0;
    for (auto _ : state) {
        r2r::Xoshiro256StarStar rng = seed.stream(i++);
        const r2r::ShufflePath p = r2r::random_path(rng, n, k);
        benchmark::DoNotOptimize(r2r::run_coupled(r2r::Deck::identity(n), {1, 2}, p, {}));
    }
}
BENCHMARK(BM_CoupledRun)->Arg(8)->Arg(16);

void BM_EvolveStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    r2r::tv::DistOverSn dist =
        r2r::tv::DistOverSn::point_mass(r2r::Deck::identity(n));
    dist = r2r::tv::evolve(dist, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(r2r::tv::evolve(dist, 1));
    }
}
BENCHMARK(BM_EvolveStep)->Arg(5)->Arg(6)->Arg(7);

void BM_LimitEigenvalue(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(r2r::chain::second_largest_eigenvalue(r2r::chain::build_c()));
}
BENCHMARK(BM_LimitEigenvalue);

void BM_TruncatedDistribution(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(r2r::chain::ytilde_distribution(50, 1000));
}
BENCHMARK(BM_TruncatedDistribution);

}  // namespace

BENCHMARK_MAIN();
