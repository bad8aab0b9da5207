#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace swarmlab {

/// Minimal PCG32 generator (the pcg32_random_r reference algorithm).
/// Bit-identical output on every platform; all randomness in this project
/// flows through explicitly seeded instances. For seed 42 on stream 54 the
/// first three outputs are 0xa15c02b7, 0x7b47f409, 0xba1d3330.
class Pcg32 {
public:
    // Stream constants used across the project; any two are distinct.
    static constexpr std::uint64_t kStreamDatagen = 54;   // constellation placement
    static constexpr std::uint64_t kStreamInit = 101;     // network initialization
    static constexpr std::uint64_t kStreamShuffle = 102;  // training epoch shuffles

    Pcg32() : Pcg32(0, kStreamDatagen) {}
    Pcg32(std::uint64_t seed, std::uint64_t stream) { reseed(seed, stream); }

    void reseed(std::uint64_t seed, std::uint64_t stream) {
        state_ = 0;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Unbiased integer in [0, bound) via rejection; bound must be nonzero.
    std::uint32_t next_below(std::uint32_t bound) {
        const std::uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            const std::uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1) with 32 bits of resolution.
    double next_double() { return next_u32() * 0x1p-32; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
};

/// Fisher-Yates shuffle driven by a Pcg32, so shuffles are reproducible.
template <typename T>
void shuffle(std::vector<T>& v, Pcg32& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = rng.next_below(static_cast<std::uint32_t>(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace swarmlab
