#pragma once

#include <cstdint>

#include "chstab/grid.hpp"

namespace chstab {

/// splitmix64: the standard 64-bit generator of Steele, Lea and Flood
/// (a Weyl sequence with a two-round xor-shift-multiply finalizer).
/// Chosen because its output is a pure function of (seed, call index) with
/// no platform-dependent state, which keeps seeded runs byte-reproducible.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits, the full double mantissa.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Independent uniform draws in [-amplitude, amplitude], one per grid point
/// in row-major order, then recentered to mean zero (so entries can reach
/// almost 2 * amplitude in magnitude, but never do in practice).
Field random_initial(const TorusGrid& grid, std::uint64_t seed, double amplitude = 0.1);

/// amplitude * cos(x_1), constant along the other axes.
Field cosine_initial(const TorusGrid& grid, double amplitude = 0.5);

} // namespace chstab
