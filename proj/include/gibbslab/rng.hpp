// Counter-based random streams.
//
// Stream derivation (stable across versions, relied on by the determinism
// contract): a stream key is key = mix(mix(master_seed) ^ GOLDEN*replica ^ tag),
// and the i-th variate of the stream is mix(key + GOLDEN*(i+1)), where mix is
// the SplitMix64 finalizer. Distinct (seed, replica, tag) triples give
// independent streams; draws depend only on the stream and its counter, never
// on scheduling.
#pragma once

#include <cstdint>
#include <vector>

#include "gibbslab/common.hpp"

namespace gibbslab {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    Rng(std::uint64_t master_seed, std::uint64_t replica, std::uint64_t tag = 0)
        : key_(mix64(mix64(master_seed) ^ (kGolden * (replica + 1)) ^ mix64(tag ^ 0x5bf0363db4a2d2c9ull))) {}

    std::uint64_t next_u64() { return mix64(key_ + kGolden * (++counter_)); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Rejection-free modulo is fine here: n is
    // always tiny (alphabet sizes, site counts) relative to 2^64.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Samples an index from an unnormalized nonnegative weight vector.
    int next_discrete(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = next_double() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    // Samples from cumulative probabilities (cdf.back() == 1 expected).
    int next_from_cdf(const std::vector<double>& cdf) {
        const double u = next_double();
        for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
            if (u < cdf[i]) return static_cast<int>(i);
        }
        return static_cast<int>(cdf.size()) - 1;
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace gibbslab
