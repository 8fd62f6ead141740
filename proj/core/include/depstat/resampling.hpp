#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "depstat/rng.hpp"

namespace depstat {

/// How replicate data sets are produced. Callers pick the scheme that encodes
/// the null hypothesis of their statistic.
enum class Scheme {
    PermuteSecondBlock,        // two-block tests: fix X, permute Y rows
    PermuteBlocksIndependently,// d-block joint independence
    PermuteTimeIndex,          // serial white-noise null: permute the series
    ParametricBootstrapAr1,    // residual tests: simulate the fitted recursion
};

const char* scheme_name(Scheme s);

struct ResamplingPlan {
    Scheme scheme = Scheme::PermuteSecondBlock;
    int reps = 999;
    std::uint64_t seed = 0;
    int threads = 1;             // execution detail only; never changes values
    bool keep_replicates = false;

    void validate() const;       // throws std::invalid_argument on reps < 0
};

/// Outcome of a single-statistic Monte Carlo test. p_value uses the add-one
/// rule (1 + #{replicate >= observed}) / (reps + 1) and is absent when
/// reps == 0.
struct TestResult {
    std::string method;
    double statistic = 0.0;
    std::optional<double> p_value;
    int reps = 0;
    std::uint64_t seed = 0;
    int n = 0;
    std::optional<double> alpha;
    Scheme scheme = Scheme::PermuteSecondBlock;
    std::vector<double> replicates;  // kept only when the plan asks for it
};

/// Outcome of a vector-statistic run: componentwise add-one p-values plus the
/// full replicate matrix (needed by Fisher combination).
struct MultiTestResult {
    std::vector<double> observed;
    std::vector<double> p_values;               // empty when reps == 0
    std::vector<std::vector<double>> replicates; // reps rows, one per replicate
    int reps = 0;
    std::uint64_t seed = 0;
};

/// Per-block row orders for one replicate under a permutation scheme.
/// perms[k][i] is the source row placed at position i of block k.
std::vector<std::vector<int>> draw_permutations(Scheme scheme, int n_rows, int n_blocks,
                                                RngStream& stream);

/// Permutation test of a scalar statistic. The engine evaluates the observed
/// value on identity orders and each replicate r on permutations drawn from
/// the stream (seed, r); replicates run in parallel but the result is
/// identical to a sequential run.
TestResult permutation_pvalue(std::string method, int n_rows, int n_blocks,
                              const std::function<double(std::span<const std::vector<int>>)>& eval,
                              const ResamplingPlan& plan);

/// Vector-statistic variant; every component gets an add-one p-value against
/// its own replicate column.
MultiTestResult permutation_pvalues(int n_rows, int n_blocks,
                                    const std::function<std::vector<double>(std::span<const std::vector<int>>)>& eval,
                                    const ResamplingPlan& plan);

/// Generic Monte Carlo runner for schemes where the replicate builds its own
/// data (parametric bootstrap). replicate(stream) must be pure given the
/// stream.
TestResult monte_carlo_pvalue(std::string method, double observed,
                              const std::function<double(RngStream&)>& replicate,
                              const ResamplingPlan& plan);

MultiTestResult monte_carlo_pvalues(std::span<const double> observed,
                                    const std::function<std::vector<double>(RngStream&)>& replicate,
                                    const ResamplingPlan& plan);

/// Fisher's rule -2 sum_A log p_A with p-values taken over the pooled set
/// {observed, replicates}; the combined statistic is recomputed for every
/// pool element the same way, so the combined p-value inherits the exact
/// exchangeability of the permutation draws.
struct FisherCombination {
    double statistic = 0.0;   // observed -2 sum log p
    double p_value = 1.0;
};

FisherCombination fisher_combine(std::span<const double> observed,
                                 const std::vector<std::vector<double>>& replicates);

}  // namespace depstat
