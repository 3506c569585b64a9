#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fracvisc {

/// Deterministic distribution helpers on top of mt19937_64. The standard
/// <random> distributions are implementation-defined bit-wise; these are not,
/// which keeps seeded artifacts byte-stable across toolchains.

/// Uniform double in [0, 1) using the top 53 bits of one engine draw.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via the Box-Muller transform; consumes two draws.
inline double standard_normal(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform01(rng);  // in (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fracvisc
