#include "mmgeo/contrastive.hpp"
#include "mmgeo/geometry.hpp"
#include "mmgeo/spectral.hpp"
#include "mmgeo/verification.hpp"
#include "mmgeo/worlds.hpp"

#include <benchmark/benchmark.h>

using namespace mmgeo;

namespace {

void BM_ExactGradients(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ContrastiveBatch b = random_batch(n, 512, 0.07, 1);
    for (auto _ : state) benchmark::DoNotOptimize(exact_gradients(b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ExactGradients)->Arg(64)->Arg(256)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CompactGradients(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ContrastiveBatch b = random_batch(n, 512, 0.07, 2);
    for (auto _ : state) benchmark::DoNotOptimize(compact_gradients(b));
}
BENCHMARK(BM_CompactGradients)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ContrastiveLoss(benchmark::State& state) {
    const ContrastiveBatch b = random_batch(static_cast<std::size_t>(state.range(0)), 512, 0.07, 3);
    for (auto _ : state) benchmark::DoNotOptimize(contrastive_loss(b));
}
BENCHMARK(BM_ContrastiveLoss)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_FiniteDifferences(benchmark::State& state) {
    const ContrastiveBatch b = random_batch(8, 16, 0.07, 4);
    for (auto _ : state) benchmark::DoNotOptimize(finite_difference_gradients(b));
}
BENCHMARK(BM_FiniteDifferences)->Unit(benchmark::kMillisecond);

void BM_Covariance(benchmark::State& state) {
    const InitSimWorld w = make_init_sim_world(1000, static_cast<std::size_t>(state.range(0)), 25, 230, 5);
    for (auto _ : state) benchmark::DoNotOptimize(covariance(w.raw_y));
}
BENCHMARK(BM_Covariance)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SymmetricEigenvalues(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const Matrix c = covariance(make_init_sim_world(1000, d, d / 20, d / 2, 6).raw_y);
    for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigenvalues(c));
}
BENCHMARK(BM_SymmetricEigenvalues)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_MlpCollapse(benchmark::State& state) {
    MlpSimConfig cfg;
    cfg.depth = static_cast<std::size_t>(state.range(0));
    cfg.width = 256;
    cfg.inputs = 500;
    for (auto _ : state) benchmark::DoNotOptimize(mlp_collapse_sim(cfg));
}
BENCHMARK(BM_MlpCollapse)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_GroupStatistics(benchmark::State& state) {
    const GapWorld w = make_gap_world(10000, 512, 64, 0.83, 0.05, 7);
    const PairGroups g = group_pairs(w.pairs, 100, 8);
    for (auto _ : state) benchmark::DoNotOptimize(group_statistics(w.pairs, g));
}
BENCHMARK(BM_GroupStatistics)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
