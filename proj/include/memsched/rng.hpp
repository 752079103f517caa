#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace memsched {

// All randomness in the project flows through these helpers so that runs are
// reproducible from a single seed across platforms. std::mt19937_64 has a
// portable output sequence; the distribution wrappers below avoid
// std::uniform_*_distribution, whose results are implementation defined.

using rng_t = std::mt19937_64;

// Integer in [lo, hi], inclusive. Modulo bias is negligible for the small
// ranges used here (task counts, swap budgets).
inline std::uint64_t uniform_u64(rng_t& g, std::uint64_t lo, std::uint64_t hi) {
    return lo + g() % (hi - lo + 1);
}

// Requires 0 <= lo <= hi. Every call site draws indices or counts.
inline int uniform_int(rng_t& g, int lo, int hi) {
    return static_cast<int>(uniform_u64(g, static_cast<std::uint64_t>(lo),
                                        static_cast<std::uint64_t>(hi)));
}

// Double in [0, 1) with 53 random bits.
inline double uniform_unit(rng_t& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_real(rng_t& g, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(g);
}

// Standard normal via Box-Muller on the portable uniform above.
inline double normal_unit(rng_t& g) {
    double u1 = uniform_unit(g);
    double u2 = uniform_unit(g);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// splitmix64 mix, used to derive independent per-restart / per-run streams
// from (seed, index) without correlated low bits.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace memsched
