#pragma once

#include <cstdint>
#include <string_view>

namespace labelcov {

// SplitMix64: tiny, seedable, and bit-exact across platforms.
struct SplitMix64 {
    std::uint64_t state;

    explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

namespace detail {

inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace detail

// Per-dataset seed from (master seed, tag, indices); independent of execution
// order, so replicates can be generated in parallel or out of order.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                           std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = detail::mix64(master ^ 0x6A09E667F3BCC909ULL);
    h = detail::mix64(h ^ detail::fnv1a64(tag));
    h = detail::mix64(h ^ (a + 0x9E3779B97F4A7C15ULL));
    h = detail::mix64(h ^ (b + 0x3C6EF372FE94F82BULL));
    return h;
}

}  // namespace labelcov
