#include "depstat/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "depstat/numerics.hpp"
#include "depstat/parallel.hpp"

namespace depstat {

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::PermuteSecondBlock: return "permute-second-block";
        case Scheme::PermuteBlocksIndependently: return "permute-blocks-independently";
        case Scheme::PermuteTimeIndex: return "permute-time-index";
        case Scheme::ParametricBootstrapAr1: return "parametric-bootstrap-ar1";
    }
    return "unknown";
}

void ResamplingPlan::validate() const {
    if (reps < 0) throw std::invalid_argument("resampling: reps must be >= 0");
}

std::vector<std::vector<int>> draw_permutations(Scheme scheme, int n_rows, int n_blocks,
                                                RngStream& stream) {
    if (n_rows < 1) throw std::invalid_argument("resampling: empty sample");
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(n_blocks));
    for (auto& p : perms) {
        p.resize(static_cast<std::size_t>(n_rows));
        std::iota(p.begin(), p.end(), 0);
    }
    switch (scheme) {
        case Scheme::PermuteSecondBlock:
            if (n_blocks != 2)
                throw std::invalid_argument("permute-second-block needs exactly 2 blocks");
            shuffle(std::span<int>(perms[1]), stream);
            break;
        case Scheme::PermuteBlocksIndependently:
            for (auto& p : perms) shuffle(std::span<int>(p), stream);
            break;
        case Scheme::PermuteTimeIndex:
            if (n_blocks != 1)
                throw std::invalid_argument("permute-time-index acts on a single series");
            shuffle(std::span<int>(perms[0]), stream);
            break;
        case Scheme::ParametricBootstrapAr1:
            throw std::invalid_argument("parametric bootstrap is not a permutation scheme");
    }
    return perms;
}

namespace {

std::vector<std::vector<int>> identity_permutations(int n_rows, int n_blocks) {
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(n_blocks));
    for (auto& p : perms) {
        p.resize(static_cast<std::size_t>(n_rows));
        std::iota(p.begin(), p.end(), 0);
    }
    return perms;
}

/// Add-one p-values, componentwise, ties counted toward rejection so the test
/// stays conservative under discreteness.
std::vector<double> add_one_pvalues(std::span<const double> observed,
                                    const std::vector<std::vector<double>>& replicates) {
    std::vector<double> p(observed.size());
    const double denom = static_cast<double>(replicates.size()) + 1.0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        long count = 0;
        for (const auto& rep : replicates) {
            if (rep[k] >= observed[k]) ++count;
        }
        p[k] = (1.0 + static_cast<double>(count)) / denom;
    }
    return p;
}

MultiTestResult run_multi(std::span<const double> observed,
                          const std::function<std::vector<double>(RngStream&)>& replicate,
                          const ResamplingPlan& plan) {
    plan.validate();
    MultiTestResult out;
    out.observed.assign(observed.begin(), observed.end());
    out.reps = plan.reps;
    out.seed = plan.seed;
    if (plan.reps == 0) return out;

    const std::size_t k = observed.size();
    out.replicates.assign(static_cast<std::size_t>(plan.reps), {});
    parallel_for(plan.reps, plan.threads, [&](int r) {
        RngStream stream = make_stream(plan.seed, static_cast<std::uint64_t>(r));
        auto stats = replicate(stream);
        if (stats.size() != k)
            throw std::logic_error("resampling: replicate returned a different statistic count");
        out.replicates[static_cast<std::size_t>(r)] = std::move(stats);
    });
    out.p_values = add_one_pvalues(out.observed, out.replicates);
    return out;
}

}  // namespace

MultiTestResult monte_carlo_pvalues(std::span<const double> observed,
                                    const std::function<std::vector<double>(RngStream&)>& replicate,
                                    const ResamplingPlan& plan) {
    return run_multi(observed, replicate, plan);
}

TestResult monte_carlo_pvalue(std::string method, double observed,
                              const std::function<double(RngStream&)>& replicate,
                              const ResamplingPlan& plan) {
    std::vector<double> obs{observed};
    auto multi = run_multi(obs, [&](RngStream& s) { return std::vector<double>{replicate(s)}; },
                           plan);
    TestResult out;
    out.method = std::move(method);
    out.statistic = observed;
    if (plan.reps > 0) out.p_value = multi.p_values[0];
    out.reps = plan.reps;
    out.seed = plan.seed;
    out.scheme = plan.scheme;
    if (plan.keep_replicates) {
        out.replicates.reserve(multi.replicates.size());
        for (const auto& rep : multi.replicates) out.replicates.push_back(rep[0]);
    }
    return out;
}

MultiTestResult permutation_pvalues(int n_rows, int n_blocks,
                                    const std::function<std::vector<double>(std::span<const std::vector<int>>)>& eval,
                                    const ResamplingPlan& plan) {
    plan.validate();
    auto identity = identity_permutations(n_rows, n_blocks);
    std::vector<double> observed = eval(identity);
    return run_multi(observed,
                     [&](RngStream& stream) {
                         auto perms = draw_permutations(plan.scheme, n_rows, n_blocks, stream);
                         return eval(perms);
                     },
                     plan);
}

TestResult permutation_pvalue(std::string method, int n_rows, int n_blocks,
                              const std::function<double(std::span<const std::vector<int>>)>& eval,
                              const ResamplingPlan& plan) {
    auto multi = permutation_pvalues(
        n_rows, n_blocks,
        [&](std::span<const std::vector<int>> perms) {
            return std::vector<double>{eval(perms)};
        },
        plan);
    TestResult out;
    out.method = std::move(method);
    out.statistic = multi.observed[0];
    if (plan.reps > 0) out.p_value = multi.p_values[0];
    out.reps = plan.reps;
    out.seed = plan.seed;
    out.n = n_rows;
    out.scheme = plan.scheme;
    if (plan.keep_replicates) {
        out.replicates.reserve(multi.replicates.size());
        for (const auto& rep : multi.replicates) out.replicates.push_back(rep[0]);
    }
    return out;
}

FisherCombination fisher_combine(std::span<const double> observed,
                                 const std::vector<std::vector<double>>& replicates) {
    if (observed.empty()) throw std::invalid_argument("fisher_combine: no statistics");
    if (replicates.empty()) throw std::invalid_argument("fisher_combine: no replicates");
    const std::size_t k = observed.size();
    const std::size_t reps = replicates.size();
    const double pool_size = static_cast<double>(reps) + 1.0;

    // Pooled per-component values, sorted ascending; #{y >= x} via lower_bound.
    std::vector<std::vector<double>> pooled(k);
    for (std::size_t c = 0; c < k; ++c) {
        pooled[c].reserve(reps + 1);
        pooled[c].push_back(observed[c]);
        for (const auto& rep : replicates) pooled[c].push_back(rep[c]);
        std::sort(pooled[c].begin(), pooled[c].end());
    }
    auto pseudo_p = [&](std::size_t c, double x) {
        const auto& v = pooled[c];
        auto it = std::lower_bound(v.begin(), v.end(), x);
        double count_ge = static_cast<double>(v.end() - it);
        return count_ge / pool_size;
    };
    auto fisher_stat = [&](const std::vector<double>& stats) {
        NeumaierSum s;
        for (std::size_t c = 0; c < k; ++c) s.add(std::log(pseudo_p(c, stats[c])));
        return -2.0 * s.value();
    };

    FisherCombination out;
    out.statistic = fisher_stat(std::vector<double>(observed.begin(), observed.end()));
    long count = 0;
    for (const auto& rep : replicates) {
        if (fisher_stat(rep) >= out.statistic) ++count;
    }
    out.p_value = (1.0 + static_cast<double>(count)) / pool_size;
    return out;
}

}  // namespace depstat
