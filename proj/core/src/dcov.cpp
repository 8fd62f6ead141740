#include "depstat/dcov.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "depstat/numerics.hpp"

namespace depstat {

Exponent::Exponent(double a) : alpha(a) {
    if (!(a > 0.0 && a < 2.0))
        throw std::invalid_argument("exponent alpha must lie in (0, 2)");
}

Matrix pairwise_distances(const Matrix& block_data, Exponent alpha) {
    validate_data_matrix(block_data);
    const int n = block_data.rows;
    const int p = block_data.cols;
    const double a = alpha.alpha;
    Matrix d(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double norm;
            if (p == 1) {
                norm = std::abs(block_data(i, 0) - block_data(j, 0));
            } else {
                double ss = 0.0;
                for (int c = 0; c < p; ++c) {
                    double diff = block_data(i, c) - block_data(j, c);
                    ss += diff * diff;
                }
                norm = std::sqrt(ss);
            }
            double val = (a == 1.0) ? norm : std::pow(norm, a);
            d(i, j) = val;
            d(j, i) = val;
        }
    }
    return d;
}

CenteredKernel double_center(const Matrix& distances) {
    if (distances.rows != distances.cols)
        throw std::invalid_argument("double_center: matrix must be square");
    const int n = distances.rows;
    std::vector<double> row_mean(static_cast<std::size_t>(n));
    NeumaierSum grand;
    for (int i = 0; i < n; ++i) {
        NeumaierSum s;
        for (int j = 0; j < n; ++j) s.add(distances(i, j));
        row_mean[static_cast<std::size_t>(i)] = s.value() / n;
        grand.add(s.value());
    }
    const double g = grand.value() / (static_cast<double>(n) * n);

    CenteredKernel out;
    out.k = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        const double ri = row_mean[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            // grouping (ri + rj) keeps the expression symmetric in i and j,
            // so K is bitwise symmetric
            out.k(i, j) = -(distances(i, j) - (ri + row_mean[static_cast<std::size_t>(j)]) + g);
        }
    }
    return out;
}

double CenteredKernel::max_row_sum() const {
    double worst = 0.0;
    for (int i = 0; i < k.rows; ++i) {
        NeumaierSum s;
        for (int j = 0; j < k.cols; ++j) s.add(k(i, j));
        worst = std::max(worst, std::abs(s.value()));
    }
    return worst;
}

double CenteredKernel::max_abs() const {
    double m = 0.0;
    for (double x : k.v) m = std::max(m, std::abs(x));
    return m;
}

CenteredKernel block_kernel(const BlockSample& sample, int block, Exponent alpha) {
    CenteredKernel kern = double_center(pairwise_distances(sample.block(block), alpha));
    kern.alpha = alpha.alpha;
    kern.block = block;
    return kern;
}

std::vector<CenteredKernel> block_kernels(const BlockSample& sample, Exponent alpha) {
    std::vector<CenteredKernel> kernels;
    kernels.reserve(static_cast<std::size_t>(sample.block_count()));
    for (int b = 0; b < sample.block_count(); ++b) kernels.push_back(block_kernel(sample, b, alpha));
    return kernels;
}

double dcov_stat(const CenteredKernel& kx, const CenteredKernel& ky) {
    const int n = kx.size();
    if (n != ky.size()) throw std::invalid_argument("dcov_stat: kernel dimension mismatch");
    NeumaierSum s;
    const double* a = kx.k.v.data();
    const double* b = ky.k.v.data();
    const std::size_t total = static_cast<std::size_t>(n) * n;
    for (std::size_t t = 0; t < total; ++t) s.add(a[t] * b[t]);
    double v = s.value() / (static_cast<double>(n) * n);
    return v < 0.0 ? 0.0 : v;
}

double dcor(const CenteredKernel& kx, const CenteredKernel& ky) {
    const double vxy = dcov_stat(kx, ky);
    const double vxx = dcov_stat(kx, kx);
    const double vyy = dcov_stat(ky, ky);
    const double den = vxx * vyy;
    if (den <= 0.0) return 0.0;
    double r = vxy / std::sqrt(den);
    return std::clamp(r, 0.0, 1.0);
}

double dcov_permuted(const CenteredKernel& kx, const CenteredKernel& ky,
                     std::span<const int> perm) {
    const int n = kx.size();
    if (n != ky.size()) throw std::invalid_argument("dcov_permuted: kernel dimension mismatch");
    if (static_cast<int>(perm.size()) != n)
        throw std::invalid_argument("dcov_permuted: permutation length mismatch");
    NeumaierSum s;
    const double* a = kx.k.v.data();
    const double* b = ky.k.v.data();
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * n;
        const double* brow = b + static_cast<std::size_t>(perm[i]) * n;
        for (int j = 0; j < n; ++j) s.add(arow[j] * brow[perm[j]]);
    }
    double v = s.value() / (static_cast<double>(n) * n);
    return v < 0.0 ? 0.0 : v;
}

std::vector<std::uint32_t> mobius_subsets(int block_count) {
    if (block_count < 2 || block_count > 16)
        throw std::invalid_argument("mobius subsets need 2 <= d <= 16 blocks");
    std::vector<std::uint32_t> masks;
    const std::uint32_t limit = 1u << block_count;
    for (std::uint32_t m = 3; m < limit; ++m) {
        if (std::popcount(m) >= 2) masks.push_back(m);
    }
    return masks;
}

double mobius_dcov(std::span<const CenteredKernel> kernels, std::uint32_t subset_mask) {
    if (std::popcount(subset_mask) < 2)
        throw std::invalid_argument("mobius_dcov: subset must contain at least two blocks");
    const int d = static_cast<int>(kernels.size());
    if (subset_mask >= (1u << d))
        throw std::invalid_argument("mobius_dcov: subset references an unknown block");
    const int n = kernels[0].size();
    std::vector<const double*> selected;
    for (int k = 0; k < d; ++k) {
        if (subset_mask & (1u << k)) {
            if (kernels[static_cast<std::size_t>(k)].size() != n)
                throw std::invalid_argument("mobius_dcov: kernel dimension mismatch");
            selected.push_back(kernels[static_cast<std::size_t>(k)].k.v.data());
        }
    }
    NeumaierSum s;
    const std::size_t total = static_cast<std::size_t>(n) * n;
    for (std::size_t t = 0; t < total; ++t) {
        double prod = selected[0][t];
        for (std::size_t k = 1; k < selected.size(); ++k) prod *= selected[k][t];
        s.add(prod);
    }
    double v = s.value() / n;
    return v < 0.0 ? 0.0 : v;
}

double mobius_dcov(const BlockSample& sample, std::uint32_t subset_mask, Exponent alpha) {
    auto kernels = block_kernels(sample, alpha);
    return mobius_dcov(kernels, subset_mask);
}

namespace {

/// All-subset Möbius statistics under per-block row permutations, sharing one
/// pass over (i, j) with a subset-product DP over bitmasks.
std::vector<double> mobius_eval(std::span<const CenteredKernel> kernels,
                                std::span<const std::uint32_t> masks,
                                std::span<const std::vector<int>> perms) {
    const int d = static_cast<int>(kernels.size());
    const int n = kernels[0].size();
    const std::uint32_t limit = 1u << d;
    std::vector<NeumaierSum> acc(limit);
    std::vector<double> prod(limit);
    std::vector<double> kv(static_cast<std::size_t>(d));
    prod[0] = 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < d; ++k) {
                const auto& p = perms[static_cast<std::size_t>(k)];
                kv[static_cast<std::size_t>(k)] =
                    kernels[static_cast<std::size_t>(k)].k(p[static_cast<std::size_t>(i)],
                                                           p[static_cast<std::size_t>(j)]);
            }
            for (std::uint32_t m = 1; m < limit; ++m) {
                const std::uint32_t low = m & (~m + 1);
                prod[m] = prod[m ^ low] * kv[static_cast<std::size_t>(std::countr_zero(low))];
            }
            for (std::uint32_t m : masks) acc[m].add(prod[m]);
        }
    }
    std::vector<double> stats;
    stats.reserve(masks.size());
    for (std::uint32_t m : masks) {
        double v = acc[m].value() / n;
        stats.push_back(v < 0.0 ? 0.0 : v);
    }
    return stats;
}

}  // namespace

MobiusResult mobius_all_subsets(const BlockSample& sample, Exponent alpha, int reps,
                                std::uint64_t seed, int threads) {
    const int d = sample.block_count();
    auto masks = mobius_subsets(d);
    auto kernels = block_kernels(sample, alpha);

    ResamplingPlan plan;
    plan.scheme = Scheme::PermuteBlocksIndependently;
    plan.reps = reps;
    plan.seed = seed;
    plan.threads = threads;
    auto multi = permutation_pvalues(
        sample.n(), d,
        [&](std::span<const std::vector<int>> perms) { return mobius_eval(kernels, masks, perms); },
        plan);

    MobiusResult out;
    out.reps = reps;
    out.seed = seed;
    out.n = sample.n();
    out.alpha = alpha.alpha;
    out.scheme = plan.scheme;
    out.subsets.resize(masks.size());
    for (std::size_t s = 0; s < masks.size(); ++s) {
        out.subsets[s].subset = masks[s];
        out.subsets[s].value = multi.observed[s];
        if (reps > 0) out.subsets[s].p_value = multi.p_values[s];
    }
    if (reps > 0) {
        auto fisher = fisher_combine(multi.observed, multi.replicates);
        out.fisher_statistic = fisher.statistic;
        out.combined_p_value = fisher.p_value;
    }
    return out;
}

TestResult dcov_test(const CenteredKernel& kx, const CenteredKernel& ky,
                     const ResamplingPlan& plan) {
    if (plan.scheme != Scheme::PermuteSecondBlock)
        throw std::invalid_argument("dcov_test: scheme must be permute-second-block");
    TestResult out = permutation_pvalue(
        "dcov", kx.size(), 2,
        [&](std::span<const std::vector<int>> perms) {
            return dcov_permuted(kx, ky, perms[1]);
        },
        plan);
    out.alpha = kx.alpha;
    return out;
}

}  // namespace depstat
