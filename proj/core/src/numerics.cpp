#include "depstat/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace depstat {

double ks_uniform_distance(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("ks_uniform_distance: empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double hi = (static_cast<double>(i) + 1.0) / n - sorted[i];
        double lo = sorted[i] - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

double ks_critical_5pct(int n) {
    if (n < 1) throw std::invalid_argument("ks_critical_5pct: n < 1");
    double rn = std::sqrt(static_cast<double>(n));
    return 1.358 / (rn + 0.12 + 0.11 / rn);
}

double binomial_pmf(int k, int n, double p) {
    if (k < 0 || k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    double lp = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                k * std::log(p) + (n - k) * std::log1p(-p);
    return std::exp(lp);
}

double binomial_cdf(int k, int n, double p) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    NeumaierSum s;
    for (int i = 0; i <= k; ++i) s.add(binomial_pmf(i, n, p));
    return std::min(1.0, s.value());
}

int binomial_quantile(double q, int n, double p) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("binomial_quantile: q outside [0,1]");
    NeumaierSum s;
    for (int k = 0; k <= n; ++k) {
        s.add(binomial_pmf(k, n, p));
        if (s.value() >= q) return k;
    }
    return n;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson_correlation: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson_correlation: need n >= 2");
    const double n = static_cast<double>(x.size());
    NeumaierSum sx, sy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / n;
    const double my = sy.value() / n;
    NeumaierSum sxy, sxx, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    const double den = sxx.value() * syy.value();
    if (den <= 0.0) return 0.0;
    return sxy.value() / std::sqrt(den);
}

}  // namespace depstat
