#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "depstat/data.hpp"
#include "depstat/dcov.hpp"
#include "depstat/matrix.hpp"
#include "depstat/resampling.hpp"

namespace depstat {

/// A time-ordered multivariate series: row t is the observation at time t.
class SeriesSample {
public:
    explicit SeriesSample(Matrix values);

    const Matrix& values() const { return values_; }
    int length() const { return values_.rows; }
    int width() const { return values_.cols; }

    SeriesSample ranked() const;

private:
    Matrix values_;
};

/// Distance autocovariance at lag l: V_n^2 of the overlapping pairs
/// (Z_t, Z_{t+l}), t = 1..n-l, so the effective sample size is m = n - l.
double lag_dcov(const SeriesSample& series, int lag, Exponent alpha);

/// Distance-autocovariance spectrum with per-lag permutation p-values and the
/// portmanteau statistic S = sum_{l<=L} (n - l) V_n^2(l).
struct LagSpectrum {
    int max_lag = 0;
    std::vector<double> values;              // V_n^2(l), l = 1..L
    std::vector<double> p_values;            // empty when reps == 0
    double portmanteau_stat = 0.0;
    std::optional<double> portmanteau_p;
    int reps = 0;
    std::uint64_t seed = 0;
    int n = 0;
    double alpha = 1.0;
    Scheme scheme = Scheme::PermuteTimeIndex;
};

/// Whole-series permutation test: valid under the iid white-noise null.
LagSpectrum acov_spectrum(const SeriesSample& series, int max_lag, Exponent alpha, int reps,
                          std::uint64_t seed, int threads = 1);

/// Lag-embedded Möbius test: the (n - m + 1)-row sample of sliding windows
/// (Z_t, ..., Z_{t+m-1}) as m blocks, resampled by permuting time indices of
/// the underlying series.
MobiusResult lag_embed_mobius(const SeriesSample& series, int window, Exponent alpha, int reps,
                              std::uint64_t seed, int threads = 1);

/// Conditional least-squares fit of Z_t = mu + phi (Z_{t-1} - mu) + eps_t
/// with a scalar phi shared across coordinates.
struct ARFit {
    std::vector<double> mu;     // per-coordinate mean
    double phi = 0.0;
    Matrix residuals;           // rows t = 2..n, so n - 1 of them
};

ARFit fit_ar1(const SeriesSample& series,
              std::span<const double> mu_known = std::span<const double>{});

/// Simulate the fitted recursion of `fit`, drawing innovations iid from the
/// centered residual rows. Burn-in >= 100 steps from mu.
SeriesSample simulate_ar1(const ARFit& fit, int length, RngStream& stream, int burn_in = 100);

/// Residual distance-autocovariance test. Fits AR(1), computes the residual
/// lag spectrum, and calibrates p-values by parametric bootstrap (resampled
/// centered residuals driven through the fitted recursion, refit each time).
/// Naive residual permutation is not valid here: parameter estimation shifts
/// the limit law.
LagSpectrum residual_serial_test(const SeriesSample& series, int max_lag, Exponent alpha,
                                 int reps, std::uint64_t seed, int threads = 1,
                                 ARFit* fit_out = nullptr);

}  // namespace depstat
