#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "judgekit/hash.hpp"

namespace judgekit {

/// Small deterministic generator (splitmix64) with explicit sampling
/// algorithms, so simulated runs are reproducible independent of the
/// standard library's distribution implementations. Streams are keyed, not
/// sequential: evaluation order and parallelism cannot change outputs.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t key) : state_(key) {}

    /// Stream keyed by (seed, label), e.g. (profile seed, record id).
    static DeterministicRng keyed(std::uint64_t seed, std::string_view label) {
        return DeterministicRng(seed ^ (fnv1a64(label) | 1ULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace judgekit
