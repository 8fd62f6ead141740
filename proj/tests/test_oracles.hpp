// Independent brute-force reference implementations used to pin expected
// values. These deliberately avoid the library's kernel and summation code:
// plain double accumulation, explicit mean loops, no shared helpers beyond
// the Matrix container.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "depstat/matrix.hpp"

namespace oracle {

inline depstat::Matrix brute_distances(const depstat::Matrix& data, double alpha) {
    const int n = data.rows;
    depstat::Matrix d(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double ss = 0.0;
            for (int c = 0; c < data.cols; ++c) {
                const double diff = data(i, c) - data(j, c);
                ss += diff * diff;
            }
            d(i, j) = std::pow(std::sqrt(ss), alpha);
        }
    }
    return d;
}

inline depstat::Matrix brute_center(const depstat::Matrix& d) {
    const int n = d.rows;
    std::vector<double> rm(static_cast<std::size_t>(n), 0.0);
    std::vector<double> cm(static_cast<std::size_t>(n), 0.0);
    double g = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            rm[static_cast<std::size_t>(i)] += d(i, j) / n;
            cm[static_cast<std::size_t>(j)] += d(i, j) / n;
            g += d(i, j) / (static_cast<double>(n) * n);
        }
    }
    depstat::Matrix k(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            k(i, j) = -(d(i, j) - rm[static_cast<std::size_t>(i)] -
                        cm[static_cast<std::size_t>(j)] + g);
        }
    }
    return k;
}

inline double brute_dcov(const depstat::Matrix& x, const depstat::Matrix& y, double alpha) {
    const depstat::Matrix kx = brute_center(brute_distances(x, alpha));
    const depstat::Matrix ky = brute_center(brute_distances(y, alpha));
    const int n = x.rows;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) s += kx(i, j) * ky(i, j);
    }
    return s / (static_cast<double>(n) * n);
}

/// V_{n,A} over the given blocks: (1/n) sum_ij prod_k K^(k)_ij.
inline double brute_mobius_dcov(const std::vector<depstat::Matrix>& blocks,
                                const std::vector<int>& subset, double alpha) {
    std::vector<depstat::Matrix> kernels;
    for (const auto& b : blocks) kernels.push_back(brute_center(brute_distances(b, alpha)));
    const int n = blocks[0].rows;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double prod = 1.0;
            for (int k : subset) prod *= kernels[static_cast<std::size_t>(k)](i, j);
            s += prod;
        }
    }
    return s / n;
}

inline bool row_le(const depstat::Matrix& m, int j, int i) {
    for (int c = 0; c < m.cols; ++c) {
        if (!(m(j, c) <= m(i, c))) return false;
    }
    return true;
}

inline double brute_bn(const depstat::Matrix& x, const depstat::Matrix& y) {
    const int n = x.rows;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double h = 0.0, fx = 0.0, fy = 0.0;
        for (int j = 0; j < n; ++j) {
            if (row_le(x, j, i) && row_le(y, j, i)) h += 1.0 / n;
            if (row_le(x, j, i)) fx += 1.0 / n;
            if (row_le(y, j, i)) fy += 1.0 / n;
        }
        const double diff = h - fx * fy;
        total += diff * diff;
    }
    return total / n;
}

inline double brute_joint_cvm(const std::vector<depstat::Matrix>& blocks) {
    const int n = blocks[0].rows;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double h = 0.0;
        for (int j = 0; j < n; ++j) {
            bool all = true;
            for (const auto& b : blocks) all = all && row_le(b, j, i);
            if (all) h += 1.0 / n;
        }
        double prod_f = 1.0;
        for (const auto& b : blocks) {
            double f = 0.0;
            for (int j = 0; j < n; ++j) {
                if (row_le(b, j, i)) f += 1.0 / n;
            }
            prod_f *= f;
        }
        const double diff = h - prod_f;
        total += diff * diff;
    }
    return total / n;
}

inline double brute_mobius_cvm(const std::vector<depstat::Matrix>& blocks,
                               const std::vector<int>& subset) {
    const int n = blocks[0].rows;
    std::vector<std::vector<double>> marg(blocks.size(),
                                          std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (row_le(blocks[k], j, i)) marg[k][static_cast<std::size_t>(i)] += 1.0 / n;
            }
        }
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double g = 0.0;
        for (int j = 0; j < n; ++j) {
            double prod = 1.0;
            for (int k : subset) {
                const double ind = row_le(blocks[static_cast<std::size_t>(k)], j, i) ? 1.0 : 0.0;
                prod *= ind - marg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            }
            g += prod;
        }
        g /= n;
        total += g * g;
    }
    return total / n;
}

/// Deterministic pseudo-random doubles for fixtures (xorshift-ish, fixed).
class FixtureRng {
public:
    explicit FixtureRng(std::uint64_t seed) : state_(seed * 2654435761u + 1) {}
    double uniform() {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        return static_cast<double>(state_ >> 11) * 0x1p-53;
    }
    double normalish() { return uniform() + uniform() + uniform() - 1.5; }
    int below(int n) { return static_cast<int>(uniform() * n) % n; }

private:
    std::uint64_t state_;
};

inline depstat::Matrix random_matrix(int n, int p, FixtureRng& rng, double scale = 2.0) {
    depstat::Matrix m(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) m(i, j) = scale * rng.normalish();
    }
    return m;
}

}  // namespace oracle
