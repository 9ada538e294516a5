#pragma once

// splitmix64: 64-bit-state generator with published constants
// (increment 0x9E3779B97F4A7C15, mix 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB).
// Chosen for the sampling paths because the whole stream is pinned down by
// the seed alone, so sample sequences are reproducible across platforms and
// standard-library versions, unlike std::mt19937 + std::uniform_real_distribution.

#include <cstdint>

namespace cavres {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }
};

}  // namespace cavres
