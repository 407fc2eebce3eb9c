#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace afm::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/**
 * @brief Philox4x32-10 block function (Salmon et al., SC'11).
 *
 * Stateless: the output is a pure function of (counter, key), so any
 * element of a stream can be produced without generating its predecessors.
 */
constexpr Counter philox4x32(Counter ctr, Key key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

constexpr Key key_from_seed(std::uint64_t seed) noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// Uniform on [0, 1) with 53 random bits.
constexpr double to_unit_closed_open(std::uint32_t lo, std::uint32_t hi) noexcept {
    const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1]; safe as a logarithm argument.
constexpr double to_unit_open_closed(std::uint32_t lo, std::uint32_t hi) noexcept {
    const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Stream tags occupying the first counter word; keep them distinct.
enum class Stream : std::uint32_t {
    loadings = 0x4C4F4144u,      // "LOAD"
    factors = 0x46414354u,       // "FACT"
    idiosyncratic = 0x49444950u,  // "IDIO"
    solver_start = 0x53545254u,  // "STRT"
};

/**
 * @brief Keyed counter-based generator.
 *
 * Every draw is addressed by (seed, stream, a, b, c). Two draws with the
 * same address are bit-identical regardless of call order or thread.
 */
class KeyedStream {
public:
    constexpr KeyedStream(std::uint64_t seed, Stream stream) noexcept
        : key_(key_from_seed(seed)), tag_(static_cast<std::uint32_t>(stream)) {}

    constexpr Counter block(std::uint32_t a, std::uint32_t b, std::uint32_t c) const noexcept {
        return philox4x32({tag_, a, b, c}, key_);
    }

    constexpr double uniform(std::uint32_t a, std::uint32_t b, std::uint32_t c) const noexcept {
        const Counter x = block(a, b, c);
        return to_unit_closed_open(x[0], x[1]);
    }

    /// Two independent standard normals (Box-Muller) from one block.
    std::pair<double, double> normal_pair(std::uint32_t a, std::uint32_t b, std::uint32_t c) const noexcept {
        const Counter x = block(a, b, c);
        const double u1 = to_unit_open_closed(x[0], x[1]);
        const double u2 = to_unit_closed_open(x[2], x[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

private:
    Key key_;
    std::uint32_t tag_;
};

/// SplitMix64 finalizer; used to derive child seeds (e.g. one per replicate).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace afm::rng
