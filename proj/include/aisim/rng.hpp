#pragma once

#include <cstdint>

namespace aisim {

/// SplitMix64 (Steele, Lea & Flood 2014). Portable: the output stream depends
/// only on the 64-bit seed, never on the standard library.
///
/// Streams are split by key: `SplitMix64::stream(seed, key)` gives an
/// independent generator per (seed, key) pair, so per-node draws do not depend
/// on the order in which nodes are visited.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr SplitMix64 stream(std::uint64_t seed, std::uint64_t key) noexcept {
        return SplitMix64(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(key ^ 0xd1b54a32d192ed03ULL));
    }

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform on [0, 1) with 53 random mantissa bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). Uses rejection to avoid modulo bias.
    constexpr std::uint64_t below(std::uint64_t n) noexcept {
        if (n == 0) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % n;
    }

private:
    std::uint64_t state_;
};

}  // namespace aisim
