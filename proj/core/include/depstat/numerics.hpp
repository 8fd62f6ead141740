#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace depstat {

/// Neumaier (improved Kahan) compensated accumulator. All O(n²) double sums in
/// this library run through it in a fixed sequential order, so statistics are
/// reproducible bit-for-bit regardless of thread count.
class NeumaierSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

/// Kolmogorov–Smirnov distance of a sample from the uniform law on [0,1].
double ks_uniform_distance(std::span<const double> values);

/// Asymptotic 5%-level KS critical value with the Stephens small-sample
/// correction: 1.358 / (sqrt(n) + 0.12 + 0.11/sqrt(n)).
double ks_critical_5pct(int n);

/// Binomial(n, p) probability mass and cumulative distribution, computed in
/// log space so they stay accurate for n in the thousands.
double binomial_pmf(int k, int n, double p);
double binomial_cdf(int k, int n, double p);

/// Smallest k with CDF(k) >= q (the usual quantile convention).
int binomial_quantile(double q, int n, double p);

/// Pearson correlation of two equal-length vectors; 0 when either is constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace depstat
