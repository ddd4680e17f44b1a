#pragma once

/**
 * Seedable, splittable random source for deterministic simulation.
 *
 * The core engine is std::mt19937_64 (fully specified by the standard),
 * and every distribution on top of it is hand-rolled here, because the
 * std::*_distribution adaptors are implementation-defined and would break
 * the bit-for-bit reproducibility contract across toolchains.
 *
 * Substreams: Rng::substream(seed, index) derives an independent stream
 * per (seed, index) pair via splitmix64 mixing, so trajectory i of a run
 * can be generated on any worker thread with identical output.
 */

#include <cmath>
#include <cstdint>
#include <random>

#include "cpbma/common.hpp"

namespace cpbma {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Mixes a base seed and a stream index into a fresh 64-bit seed.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent generator for substream `index` of `seed`.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(derive_stream_seed(seed, index));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi], unbiased via rejection.
    long uniform_int(long lo, long hi) {
        if (lo > hi) throw ConfigError("uniform_int: empty range");
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1u;
        if (range == 0) return lo + static_cast<long>(next_u64());  // full 2^64 span
        const std::uint64_t reject_below = (0u - range) % range;    // 2^64 mod range
        std::uint64_t x = next_u64();
        while (x < reject_below) x = next_u64();
        return lo + static_cast<long>(x % range);
    }

    /// Standard normal via Box-Muller (cosine branch).
    double normal() {
        // u1 in (0, 1] keeps the log finite.
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace cpbma
