#include "depstat/ecdf.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "depstat/numerics.hpp"

namespace depstat {

double ecdf(const Matrix& data, std::span<const double> point) {
    if (static_cast<int>(point.size()) != data.cols)
        throw std::invalid_argument("ecdf: point dimension mismatch");
    int count = 0;
    for (int i = 0; i < data.rows; ++i) {
        bool le = true;
        for (int j = 0; j < data.cols && le; ++j) le = data(i, j) <= point[static_cast<std::size_t>(j)];
        if (le) ++count;
    }
    return static_cast<double>(count) / data.rows;
}

namespace {

BlockSample concat_two(const Matrix& x, const Matrix& y) {
    if (x.rows != y.rows) throw std::invalid_argument("cvm: sample size mismatch");
    Matrix joined(x.rows, x.cols + y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j < x.cols; ++j) joined(i, j) = x(i, j);
        for (int j = 0; j < y.cols; ++j) joined(i, x.cols + j) = y(i, j);
    }
    BlockSpec spec;
    spec.blocks.resize(2);
    for (int j = 0; j < x.cols; ++j) spec.blocks[0].push_back(j);
    for (int j = 0; j < y.cols; ++j) spec.blocks[1].push_back(x.cols + j);
    return BlockSample(std::move(joined), std::move(spec));
}

std::vector<std::vector<int>> identity_perms(int n, int d) {
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(d));
    for (auto& p : perms) {
        p.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    }
    return perms;
}

}  // namespace

CvmPrepared::CvmPrepared(const BlockSample& sample) : n_(sample.n()), d_(sample.block_count()) {
    indicator_.resize(static_cast<std::size_t>(d_));
    marginal_.resize(static_cast<std::size_t>(d_));
    for (int k = 0; k < d_; ++k) {
        Matrix b = sample.block(k);
        auto& ind = indicator_[static_cast<std::size_t>(k)];
        auto& marg = marginal_[static_cast<std::size_t>(k)];
        ind.assign(static_cast<std::size_t>(n_) * n_, 0);
        marg.assign(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < n_; ++i) {
            int count = 0;
            for (int j = 0; j < n_; ++j) {
                bool le = true;
                for (int c = 0; c < b.cols && le; ++c) le = b(j, c) <= b(i, c);
                std::uint8_t bit = le ? 1 : 0;
                ind[static_cast<std::size_t>(j) * n_ + i] = bit;
                count += bit;
            }
            marg[static_cast<std::size_t>(i)] = static_cast<double>(count) / n_;
        }
    }
}

double CvmPrepared::eval_joint(std::span<const std::vector<int>> perms) const {
    NeumaierSum total;
    for (int i = 0; i < n_; ++i) {
        int joint_count = 0;
        for (int j = 0; j < n_; ++j) {
            bool all_le = true;
            for (int k = 0; k < d_ && all_le; ++k) {
                const auto& p = perms[static_cast<std::size_t>(k)];
                all_le = indicator_[static_cast<std::size_t>(k)]
                                   [static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) * n_ +
                                    p[static_cast<std::size_t>(i)]] != 0;
            }
            if (all_le) ++joint_count;
        }
        double h = static_cast<double>(joint_count) / n_;
        double prod_f = 1.0;
        for (int k = 0; k < d_; ++k) {
            const auto& p = perms[static_cast<std::size_t>(k)];
            prod_f *= marginal_[static_cast<std::size_t>(k)]
                               [static_cast<std::size_t>(p[static_cast<std::size_t>(i)])];
        }
        const double diff = h - prod_f;
        total.add(diff * diff);
    }
    return total.value() / n_;
}

std::vector<double> CvmPrepared::eval_mobius(std::span<const std::vector<int>> perms,
                                             std::span<const std::uint32_t> masks) const {
    const std::uint32_t limit = 1u << d_;
    std::vector<NeumaierSum> t_acc(masks.size());
    std::vector<NeumaierSum> g_acc(limit);
    std::vector<double> prod(limit);
    std::vector<double> factor(static_cast<std::size_t>(d_));
    prod[0] = 1.0;
    for (int i = 0; i < n_; ++i) {
        for (auto& acc : g_acc) acc = NeumaierSum();
        for (int j = 0; j < n_; ++j) {
            for (int k = 0; k < d_; ++k) {
                const auto& p = perms[static_cast<std::size_t>(k)];
                const int pi = p[static_cast<std::size_t>(i)];
                const int pj = p[static_cast<std::size_t>(j)];
                const double ind =
                    indicator_[static_cast<std::size_t>(k)][static_cast<std::size_t>(pj) * n_ + pi];
                factor[static_cast<std::size_t>(k)] =
                    ind - marginal_[static_cast<std::size_t>(k)][static_cast<std::size_t>(pi)];
            }
            for (std::uint32_t m = 1; m < limit; ++m) {
                const std::uint32_t low = m & (~m + 1);
                prod[m] = prod[m ^ low] * factor[static_cast<std::size_t>(std::countr_zero(low))];
            }
            for (std::size_t s = 0; s < masks.size(); ++s) g_acc[masks[s]].add(prod[masks[s]]);
        }
        for (std::size_t s = 0; s < masks.size(); ++s) {
            const double g = g_acc[masks[s]].value() / n_;
            t_acc[s].add(g * g);
        }
    }
    std::vector<double> stats;
    stats.reserve(masks.size());
    for (auto& acc : t_acc) stats.push_back(acc.value() / n_);
    return stats;
}

double bn_stat(const Matrix& x, const Matrix& y) {
    CvmPrepared prepared(concat_two(x, y));
    auto id = identity_perms(prepared.n(), 2);
    return prepared.eval_joint(id);
}

double joint_cvm(const BlockSample& sample) {
    if (sample.block_count() < 2)
        throw std::invalid_argument("joint_cvm: need at least two blocks");
    CvmPrepared prepared(sample);
    auto id = identity_perms(prepared.n(), prepared.block_count());
    return prepared.eval_joint(id);
}

double mobius_cvm(const BlockSample& sample, std::uint32_t subset_mask) {
    if (std::popcount(subset_mask) < 2)
        throw std::invalid_argument("mobius_cvm: subset must contain at least two blocks");
    if (subset_mask >= (1u << sample.block_count()))
        throw std::invalid_argument("mobius_cvm: subset references an unknown block");
    CvmPrepared prepared(sample);
    auto id = identity_perms(prepared.n(), prepared.block_count());
    std::uint32_t masks[1] = {subset_mask};
    return prepared.eval_mobius(id, masks)[0];
}

TestResult cvm_test(const Matrix& x, const Matrix& y, const ResamplingPlan& plan) {
    if (plan.scheme != Scheme::PermuteSecondBlock)
        throw std::invalid_argument("cvm_test: scheme must be permute-second-block");
    CvmPrepared prepared(concat_two(x, y));
    TestResult out = permutation_pvalue(
        "cvm", prepared.n(), 2,
        [&](std::span<const std::vector<int>> perms) { return prepared.eval_joint(perms); }, plan);
    return out;
}

MobiusResult mobius_cvm_all_subsets(const BlockSample& sample, int reps, std::uint64_t seed,
                                    int threads) {
    auto masks = mobius_subsets(sample.block_count());
    CvmPrepared prepared(sample);

    ResamplingPlan plan;
    plan.scheme = Scheme::PermuteBlocksIndependently;
    plan.reps = reps;
    plan.seed = seed;
    plan.threads = threads;
    auto multi = permutation_pvalues(
        sample.n(), sample.block_count(),
        [&](std::span<const std::vector<int>> perms) { return prepared.eval_mobius(perms, masks); },
        plan);

    MobiusResult out;
    out.reps = reps;
    out.seed = seed;
    out.n = sample.n();
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

}  // namespace depstat
