#include "depstat/serial.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "depstat/numerics.hpp"

namespace depstat {

SeriesSample::SeriesSample(Matrix values) : values_(std::move(values)) {
    validate_data_matrix(values_);
    if (values_.rows < 3) throw std::invalid_argument("series: need at least 3 observations");
}

SeriesSample SeriesSample::ranked() const { return SeriesSample(to_ranks(values_)); }

namespace {

Matrix rows_slice(const Matrix& m, int first, int count) {
    Matrix out(count, m.cols);
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < m.cols; ++j) out(i, j) = m(first + i, j);
    }
    return out;
}

/// Distance matrix of the whole series plus fused evaluators for the lag
/// statistics under a time permutation. The fused path repeats the
/// double_center / dcov_stat arithmetic term for term, so identity
/// permutations reproduce lag_dcov bit-exactly.
class SerialPrepared {
public:
    SerialPrepared(const SeriesSample& series, Exponent alpha)
        : dfull_(pairwise_distances(series.values(), alpha)), n_(series.length()) {}

    int length() const { return n_; }

    /// V_n^2(l) for l = 1..max_lag followed by the portmanteau statistic
    /// sum_l (n - l) V_n^2(l).
    std::vector<double> spectrum_under(std::span<const int> perm, int max_lag) const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(max_lag) + 1);
        NeumaierSum portmanteau;
        std::vector<double> rmx, rmy;
        for (int lag = 1; lag <= max_lag; ++lag) {
            const int m = n_ - lag;
            const double gx = row_means(perm, 0, m, rmx);
            const double gy = row_means(perm, lag, m, rmy);
            NeumaierSum acc;
            for (int a = 0; a < m; ++a) {
                for (int b = 0; b < m; ++b) {
                    const double cx =
                        -(dist(perm, a, b) -
                          (rmx[static_cast<std::size_t>(a)] + rmx[static_cast<std::size_t>(b)]) +
                          gx);
                    const double cy =
                        -(dist(perm, a + lag, b + lag) -
                          (rmy[static_cast<std::size_t>(a)] + rmy[static_cast<std::size_t>(b)]) +
                          gy);
                    acc.add(cx * cy);
                }
            }
            double v = acc.value() / (static_cast<double>(m) * m);
            if (v < 0.0) v = 0.0;
            out.push_back(v);
            portmanteau.add(static_cast<double>(n_ - lag) * v);
        }
        out.push_back(portmanteau.value());
        return out;
    }

    /// Möbius statistics of the sliding-window sample under a time
    /// permutation: block k of window row a is series row perm[a + k].
    std::vector<double> window_mobius_under(std::span<const int> perm, int window,
                                            std::span<const std::uint32_t> masks) const {
        const int d = window;
        const int nw = n_ - window + 1;
        const std::uint32_t limit = 1u << d;
        std::vector<std::vector<double>> rm(static_cast<std::size_t>(d));
        std::vector<double> grand(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) {
            grand[static_cast<std::size_t>(k)] =
                row_means(perm, k, nw, rm[static_cast<std::size_t>(k)]);
        }
        std::vector<NeumaierSum> acc(limit);
        std::vector<double> prod(limit);
        std::vector<double> kv(static_cast<std::size_t>(d));
        prod[0] = 1.0;
        for (int i = 0; i < nw; ++i) {
            for (int j = 0; j < nw; ++j) {
                for (int k = 0; k < d; ++k) {
                    const auto& r = rm[static_cast<std::size_t>(k)];
                    kv[static_cast<std::size_t>(k)] =
                        -(dist(perm, i + k, j + k) -
                          (r[static_cast<std::size_t>(i)] + r[static_cast<std::size_t>(j)]) +
                          grand[static_cast<std::size_t>(k)]);
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
            double v = acc[m].value() / nw;
            stats.push_back(v < 0.0 ? 0.0 : v);
        }
        return stats;
    }

private:
    double dist(std::span<const int> perm, int a, int b) const {
        return dfull_(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
    }
    // Mirrors double_center: means from per-row sums, grand mean from the sum
    // of row sums, so identity permutations reproduce lag_dcov bit-exactly.
    double row_means(std::span<const int> perm, int offset, int m, std::vector<double>& out) const {
        out.resize(static_cast<std::size_t>(m));
        NeumaierSum grand;
        for (int a = 0; a < m; ++a) {
            NeumaierSum s;
            for (int b = 0; b < m; ++b) s.add(dist(perm, a + offset, b + offset));
            out[static_cast<std::size_t>(a)] = s.value() / m;
            grand.add(s.value());
        }
        return grand.value() / (static_cast<double>(m) * m);
    }

    Matrix dfull_;
    int n_;
};

std::vector<int> identity_order(int n) {
    std::vector<int> id(static_cast<std::size_t>(n));
    std::iota(id.begin(), id.end(), 0);
    return id;
}

void check_lag_range(int lag, int n) {
    if (lag < 1 || lag > n - 2)
        throw std::invalid_argument("lag out of range: need 1 <= lag <= n - 2");
}

}  // namespace

double lag_dcov(const SeriesSample& series, int lag, Exponent alpha) {
    const int n = series.length();
    check_lag_range(lag, n);
    const int m = n - lag;
    Matrix x = rows_slice(series.values(), 0, m);
    Matrix y = rows_slice(series.values(), lag, m);
    CenteredKernel kx = double_center(pairwise_distances(x, alpha));
    CenteredKernel ky = double_center(pairwise_distances(y, alpha));
    return dcov_stat(kx, ky);
}

LagSpectrum acov_spectrum(const SeriesSample& series, int max_lag, Exponent alpha, int reps,
                          std::uint64_t seed, int threads) {
    const int n = series.length();
    check_lag_range(max_lag, n);
    SerialPrepared prepared(series, alpha);

    ResamplingPlan plan;
    plan.scheme = Scheme::PermuteTimeIndex;
    plan.reps = reps;
    plan.seed = seed;
    plan.threads = threads;
    auto multi = permutation_pvalues(
        n, 1,
        [&](std::span<const std::vector<int>> perms) {
            return prepared.spectrum_under(perms[0], max_lag);
        },
        plan);

    LagSpectrum out;
    out.max_lag = max_lag;
    out.values.assign(multi.observed.begin(), multi.observed.end() - 1);
    out.portmanteau_stat = multi.observed.back();
    if (reps > 0) {
        out.p_values.assign(multi.p_values.begin(), multi.p_values.end() - 1);
        out.portmanteau_p = multi.p_values.back();
    }
    out.reps = reps;
    out.seed = seed;
    out.n = n;
    out.alpha = alpha.alpha;
    out.scheme = plan.scheme;
    return out;
}

MobiusResult lag_embed_mobius(const SeriesSample& series, int window, Exponent alpha, int reps,
                              std::uint64_t seed, int threads) {
    if (window < 2 || window > 6)
        throw std::invalid_argument("lag_embed_mobius: window must be in [2, 6]");
    const int n = series.length();
    const int nw = n - window + 1;
    if (nw < 10)
        throw std::invalid_argument("lag_embed_mobius: window too large for series (need n - m + 1 >= 10)");
    auto masks = mobius_subsets(window);
    SerialPrepared prepared(series, alpha);

    ResamplingPlan plan;
    plan.scheme = Scheme::PermuteTimeIndex;
    plan.reps = reps;
    plan.seed = seed;
    plan.threads = threads;
    auto multi = permutation_pvalues(
        n, 1,
        [&](std::span<const std::vector<int>> perms) {
            return prepared.window_mobius_under(perms[0], window, masks);
        },
        plan);

    MobiusResult out;
    out.reps = reps;
    out.seed = seed;
    out.n = nw;
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

ARFit fit_ar1(const SeriesSample& series, std::span<const double> mu_known) {
    const Matrix& z = series.values();
    const int n = z.rows;
    const int w = z.cols;
    ARFit fit;
    if (!mu_known.empty()) {
        if (static_cast<int>(mu_known.size()) != w)
            throw std::invalid_argument("fit_ar1: mu dimension mismatch");
        fit.mu.assign(mu_known.begin(), mu_known.end());
    } else {
        fit.mu.resize(static_cast<std::size_t>(w));
        for (int c = 0; c < w; ++c) {
            NeumaierSum s;
            for (int t = 0; t < n; ++t) s.add(z(t, c));
            fit.mu[static_cast<std::size_t>(c)] = s.value() / n;
        }
    }
    NeumaierSum num, den;
    for (int t = 1; t < n; ++t) {
        for (int c = 0; c < w; ++c) {
            const double cur = z(t, c) - fit.mu[static_cast<std::size_t>(c)];
            const double prev = z(t - 1, c) - fit.mu[static_cast<std::size_t>(c)];
            num.add(cur * prev);
            den.add(prev * prev);
        }
    }
    if (den.value() == 0.0)
        throw std::invalid_argument("fit_ar1: constant series, zero lag variance");
    fit.phi = num.value() / den.value();
    fit.residuals = Matrix(n - 1, w);
    for (int t = 1; t < n; ++t) {
        for (int c = 0; c < w; ++c) {
            const double cur = z(t, c) - fit.mu[static_cast<std::size_t>(c)];
            const double prev = z(t - 1, c) - fit.mu[static_cast<std::size_t>(c)];
            fit.residuals(t - 1, c) = cur - fit.phi * prev;
        }
    }
    return fit;
}

SeriesSample simulate_ar1(const ARFit& fit, int length, RngStream& stream, int burn_in) {
    if (!(std::abs(fit.phi) < 1.0))
        throw std::invalid_argument("simulate_ar1: |phi| must be < 1");
    if (burn_in < 100) throw std::invalid_argument("simulate_ar1: burn-in must be >= 100");
    const int w = fit.residuals.cols;
    const int n_res = fit.residuals.rows;

    // Innovations are drawn iid from the centered residual rows.
    Matrix centered = fit.residuals;
    for (int c = 0; c < w; ++c) {
        NeumaierSum s;
        for (int t = 0; t < n_res; ++t) s.add(centered(t, c));
        const double mean = s.value() / n_res;
        for (int t = 0; t < n_res; ++t) centered(t, c) -= mean;
    }

    std::vector<double> state(fit.mu.begin(), fit.mu.end());
    Matrix out(length, w);
    for (int t = 0; t < burn_in + length; ++t) {
        const int pick = static_cast<int>(stream.uniform_below(static_cast<std::uint64_t>(n_res)));
        for (int c = 0; c < w; ++c) {
            const double mu_c = fit.mu[static_cast<std::size_t>(c)];
            state[static_cast<std::size_t>(c)] =
                mu_c + fit.phi * (state[static_cast<std::size_t>(c)] - mu_c) + centered(pick, c);
        }
        if (t >= burn_in) {
            for (int c = 0; c < w; ++c) out(t - burn_in, c) = state[static_cast<std::size_t>(c)];
        }
    }
    return SeriesSample(std::move(out));
}

LagSpectrum residual_serial_test(const SeriesSample& series, int max_lag, Exponent alpha,
                                 int reps, std::uint64_t seed, int threads, ARFit* fit_out) {
    ARFit fit = fit_ar1(series);
    SeriesSample residuals(fit.residuals);
    const int nr = residuals.length();
    check_lag_range(max_lag, nr);
    if (fit_out) *fit_out = fit;

    SerialPrepared prepared(residuals, alpha);
    const std::vector<double> observed = prepared.spectrum_under(identity_order(nr), max_lag);

    ResamplingPlan plan;
    plan.scheme = Scheme::ParametricBootstrapAr1;
    plan.reps = reps;
    plan.seed = seed;
    plan.threads = threads;
    auto multi = monte_carlo_pvalues(
        observed,
        [&](RngStream& stream) {
            SeriesSample sim = simulate_ar1(fit, series.length(), stream);
            ARFit refit = fit_ar1(sim);
            SeriesSample sim_resid(refit.residuals);
            SerialPrepared rep_prepared(sim_resid, alpha);
            return rep_prepared.spectrum_under(identity_order(sim_resid.length()), max_lag);
        },
        plan);

    LagSpectrum out;
    out.max_lag = max_lag;
    out.values.assign(multi.observed.begin(), multi.observed.end() - 1);
    out.portmanteau_stat = multi.observed.back();
    if (reps > 0) {
        out.p_values.assign(multi.p_values.begin(), multi.p_values.end() - 1);
        out.portmanteau_p = multi.p_values.back();
    }
    out.reps = reps;
    out.seed = seed;
    out.n = nr;
    out.alpha = alpha.alpha;
    out.scheme = plan.scheme;
    return out;
}

}  // namespace depstat
