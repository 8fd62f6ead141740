#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace depstat {

/// SplitMix64 random stream. Streams for distinct (seed, index) pairs are
/// derived through the avalanche mixer, so replicate r of a resampling run can
/// be computed on any thread, in any order, with identical output.
///
/// The generator name is recorded in test metadata so runs are auditable.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index)
        : state_(mix(mix(seed + 0x9E3779B97F4A7C15ULL) + stream_index)) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform on (0, 1].
    double next_double() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53;
    }

    /// Uniform integer in [0, bound), bound >= 1. Rejection sampling over a
    /// power-of-two mask keeps the draw exactly uniform.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t mask = ~0ULL >> std::countl_zero(bound - 1);
        std::uint64_t r;
        do {
            r = next_u64() & mask;
        } while (r >= bound);
        return r;
    }

    /// Standard normal via Box–Muller; consumes two uniforms per pair and
    /// caches the second value.
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    static const char* name() { return "splitmix64"; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

inline RngStream make_stream(std::uint64_t seed, std::uint64_t stream_index) {
    return RngStream(seed, stream_index);
}

/// Fisher–Yates shuffle driven by our own stream. std::shuffle is not used
/// anywhere: its output is implementation-defined and would break cross-
/// platform reproducibility of seeded runs.
template <typename T>
void shuffle(std::span<T> values, RngStream& stream) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(stream.uniform_below(i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace depstat
