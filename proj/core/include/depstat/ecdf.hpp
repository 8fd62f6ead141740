#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "depstat/data.hpp"
#include "depstat/dcov.hpp"
#include "depstat/matrix.hpp"
#include "depstat/resampling.hpp"

namespace depstat {

/// Multivariate empirical CDF of `data` at `point`:
/// (1/n) #{rows i : data_i <= point componentwise}.
double ecdf(const Matrix& data, std::span<const double> point);

/// Cramér–von Mises independence statistic
/// B_n = (1/n) sum_i {H_n(X_i,Y_i) - F_X(X_i) F_Y(Y_i)}^2, in [0, 1/16].
double bn_stat(const Matrix& x, const Matrix& y);

/// Joint CvM statistic for d blocks:
/// (1/n) sum_i {H_n(Z_i) - prod_k F_k(Z_ik)}^2. For d = 2 this is bn_stat
/// evaluated through the identical summation, bit for bit.
double joint_cvm(const BlockSample& sample);

/// Möbius CvM statistic for a block subset A, |A| >= 2:
/// T_{n,A} = (1/n) sum_i G_A(Z_i)^2 with
/// G_A(z) = (1/n) sum_j prod_{k in A} {1(Z_jk <= z_k) - F_k(z_k)}.
double mobius_cvm(const BlockSample& sample, std::uint32_t subset_mask);

/// Precomputed per-block indicator tables; evaluates the CvM statistics under
/// per-block row permutations in O(n^2 d) per replicate.
class CvmPrepared {
public:
    explicit CvmPrepared(const BlockSample& sample);

    int n() const { return n_; }
    int block_count() const { return d_; }

    /// Joint statistic with block k's rows reordered by perms[k].
    double eval_joint(std::span<const std::vector<int>> perms) const;

    /// One Möbius statistic per mask in `masks`, same reordering convention.
    std::vector<double> eval_mobius(std::span<const std::vector<int>> perms,
                                    std::span<const std::uint32_t> masks) const;

private:
    int n_ = 0;
    int d_ = 0;
    std::vector<std::vector<std::uint8_t>> indicator_;  // [k][j*n+i] = 1(Z_jk <= Z_ik)
    std::vector<std::vector<double>> marginal_;         // [k][i] = F_k(Z_ik)
};

/// Permutation test of B_n (X fixed, Y permuted).
TestResult cvm_test(const Matrix& x, const Matrix& y, const ResamplingPlan& plan);

/// Möbius CvM battery over all subsets with the independent-block permutation
/// scheme and Fisher-combined p-value, mirroring mobius_all_subsets.
MobiusResult mobius_cvm_all_subsets(const BlockSample& sample, int reps, std::uint64_t seed,
                                    int threads = 1);

}  // namespace depstat
