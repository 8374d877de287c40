#ifndef MORANFRAC_RNG_HPP
#define MORANFRAC_RNG_HPP

#include <cstdint>

namespace moranfrac::rng {

// Counter-based generator: every variate is a pure function of
// (seed, stream, counter).  Streams index independent samples, counters
// index construction levels, so sampling is reproducible and trivially
// parallel.  The mixer is the splitmix64 finalizer; test vectors are
// frozen in the unit tests.

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t keyed(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double unit(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return to_unit(keyed(seed, stream, counter));
}

/// Draws an index from cumulative weights cum (non-decreasing, cum.back() ~ 1).
inline std::size_t pick_index(const double* cum, std::size_t n, double u) {
    for (std::size_t idx = 0; idx + 1 < n; ++idx)
        if (u < cum[idx]) return idx;
    return n - 1;
}

}  // namespace moranfrac::rng

#endif
