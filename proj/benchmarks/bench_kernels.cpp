#include <benchmark/benchmark.h>

#include <vector>

#include "depstat/depstat.hpp"

using namespace depstat;

namespace {

Matrix gaussian_matrix(int n, int p, std::uint64_t seed) {
    RngStream s = make_stream(seed, 0);
    Matrix m(n, p);
    for (double& v : m.v) v = s.next_gaussian();
    return m;
}

BlockSample two_blocks(int n, std::uint64_t seed) {
    Matrix m = gaussian_matrix(n, 2, seed);
    BlockSpec spec;
    spec.blocks = {{0}, {1}};
    return BlockSample(std::move(m), std::move(spec));
}

}  // namespace

static void BM_pairwise_distances(benchmark::State& state) {
    Matrix data = gaussian_matrix(static_cast<int>(state.range(0)), 3, 1);
    Exponent alpha(1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pairwise_distances(data, alpha));
    }
}
BENCHMARK(BM_pairwise_distances)->Arg(100)->Arg(500)->Arg(2000);

static void BM_double_center(benchmark::State& state) {
    Matrix d = pairwise_distances(gaussian_matrix(static_cast<int>(state.range(0)), 3, 2), Exponent(1.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(double_center(d));
    }
}
BENCHMARK(BM_double_center)->Arg(100)->Arg(500)->Arg(2000);

static void BM_dcov_stat(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    CenteredKernel kx = double_center(pairwise_distances(gaussian_matrix(n, 2, 3), Exponent(1.0)));
    CenteredKernel ky = double_center(pairwise_distances(gaussian_matrix(n, 2, 4), Exponent(1.0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dcov_stat(kx, ky));
    }
}
BENCHMARK(BM_dcov_stat)->Arg(100)->Arg(500)->Arg(2000);

static void BM_dcov_permutation_replicate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    CenteredKernel kx = double_center(pairwise_distances(gaussian_matrix(n, 2, 5), Exponent(1.0)));
    CenteredKernel ky = double_center(pairwise_distances(gaussian_matrix(n, 2, 6), Exponent(1.0)));
    RngStream stream = make_stream(7, 0);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (auto _ : state) {
        shuffle(std::span<int>(perm), stream);
        benchmark::DoNotOptimize(dcov_permuted(kx, ky, perm));
    }
}
BENCHMARK(BM_dcov_permutation_replicate)->Arg(50)->Arg(200)->Arg(1000);

static void BM_dcov_test_reps(benchmark::State& state) {
    BlockSample sample = two_blocks(100, 8);
    Exponent alpha(1.0);
    CenteredKernel kx = block_kernel(sample, 0, alpha);
    CenteredKernel ky = block_kernel(sample, 1, alpha);
    ResamplingPlan plan;
    plan.scheme = Scheme::PermuteSecondBlock;
    plan.reps = static_cast<int>(state.range(0));
    plan.seed = 9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dcov_test(kx, ky, plan));
    }
}
BENCHMARK(BM_dcov_test_reps)->Arg(199)->Arg(999);

static void BM_cvm_joint(benchmark::State& state) {
    BlockSample sample = two_blocks(static_cast<int>(state.range(0)), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(joint_cvm(sample));
    }
}
BENCHMARK(BM_cvm_joint)->Arg(100)->Arg(500);

static void BM_mobius_all_subsets_d3(benchmark::State& state) {
    Matrix m = gaussian_matrix(static_cast<int>(state.range(0)), 3, 11);
    BlockSpec spec;
    spec.blocks = {{0}, {1}, {2}};
    BlockSample sample(std::move(m), std::move(spec));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mobius_all_subsets(sample, Exponent(1.0), 99, 12, 1));
    }
}
BENCHMARK(BM_mobius_all_subsets_d3)->Arg(50)->Arg(100);

static void BM_acov_spectrum(benchmark::State& state) {
    Matrix m = gaussian_matrix(static_cast<int>(state.range(0)), 1, 13);
    SeriesSample series(std::move(m));
    for (auto _ : state) {
        benchmark::DoNotOptimize(acov_spectrum(series, 5, Exponent(1.0), 99, 14, 1));
    }
}
BENCHMARK(BM_acov_spectrum)->Arg(100)->Arg(200);

BENCHMARK_MAIN();
