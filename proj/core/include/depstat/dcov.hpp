#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "depstat/data.hpp"
#include "depstat/matrix.hpp"
#include "depstat/resampling.hpp"

namespace depstat {

/// Fractional distance exponent. alpha = 1 is the Brownian case; other values
/// in (0, 2) correspond to fractional Brownian motion covariance structure.
struct Exponent {
    double alpha;

    explicit Exponent(double a);
};

/// D_ij = |z_i - z_j|^alpha with the Euclidean norm over the block columns.
/// Symmetric, zero diagonal, nonnegative.
Matrix pairwise_distances(const Matrix& block_data, Exponent alpha);

/// Double-centered negated distance matrix: K_ij = -(D_ij - rowmean_i
/// - colmean_j + grandmean). Every row and column sums to zero, and per-block
/// kernels multiply directly in the Möbius statistics.
struct CenteredKernel {
    Matrix k;
    double alpha = 1.0;
    int block = -1;

    int size() const { return k.rows; }

    /// Max |row sum| over rows; the invariant keeps it below
    /// 1e-9 * n * max|K|.
    double max_row_sum() const;
    double max_abs() const;
};

CenteredKernel double_center(const Matrix& distances);

/// Kernel for one block of a sample, optionally on normalized ranks.
CenteredKernel block_kernel(const BlockSample& sample, int block, Exponent alpha);
std::vector<CenteredKernel> block_kernels(const BlockSample& sample, Exponent alpha);

/// Empirical squared distance covariance V_n^2 = n^-2 sum_ij Kx_ij Ky_ij.
/// Clamped to >= 0 (it is a squared weighted norm; only fp noise can push the
/// double sum below zero).
double dcov_stat(const CenteredKernel& kx, const CenteredKernel& ky);

/// Distance correlation R_n in [0, 1]; 0 when either self-dcov vanishes.
double dcor(const CenteredKernel& kx, const CenteredKernel& ky);

/// Möbius distance-covariance statistic over a subset A of blocks, |A| >= 2:
/// V_{n,A} = n^-1 sum_ij prod_{k in A} K^(k)_ij. The per-block kernel is the
/// closed form of the characteristic-function integral with the product
/// distance-covariance weight, so for |A| = 2 this equals n * V_n^2.
double mobius_dcov(std::span<const CenteredKernel> kernels, std::uint32_t subset_mask);
double mobius_dcov(const BlockSample& sample, std::uint32_t subset_mask, Exponent alpha);

/// All subsets of {0..d-1} with at least two members, ordered by increasing
/// bitmask. There are 2^d - d - 1 of them.
std::vector<std::uint32_t> mobius_subsets(int block_count);

struct SubsetStatistic {
    std::uint32_t subset = 0;  // bitmask over blocks
    double value = 0.0;
    std::optional<double> p_value;  // absent when reps == 0
};

struct MobiusResult {
    std::vector<SubsetStatistic> subsets;
    std::optional<double> fisher_statistic;  // -2 sum_A log p_A over the observed subsets
    std::optional<double> combined_p_value;  // calibrated against the same replicates
    int reps = 0;
    std::uint64_t seed = 0;
    int n = 0;
    std::optional<double> alpha;
    Scheme scheme = Scheme::PermuteBlocksIndependently;
};

/// Full Möbius battery: one statistic per subset with permutation p-values
/// (each block permuted independently) plus the Fisher-combined p-value,
/// calibrated replicate-by-replicate against the shared permutation draws.
MobiusResult mobius_all_subsets(const BlockSample& sample, Exponent alpha, int reps,
                                std::uint64_t seed, int threads = 1);

/// Two-block permutation test of V_n^2 (X rows fixed, Y rows permuted).
TestResult dcov_test(const CenteredKernel& kx, const CenteredKernel& ky,
                     const ResamplingPlan& plan);

/// Statistic evaluator for V_n^2 under a row permutation of the second block;
/// shared by dcov_test and reused by the Monte Carlo harness.
double dcov_permuted(const CenteredKernel& kx, const CenteredKernel& ky,
                     std::span<const int> perm);

}  // namespace depstat
