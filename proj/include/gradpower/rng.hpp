#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gradpower {

// splitmix64, used only to expand a 64-bit seed into generator state.
struct SplitMix64 {
    std::uint64_t s;

    explicit SplitMix64(std::uint64_t seed) : s(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// xoshiro256++. Implemented directly (not via <random>) so that byte-level
// reproducibility is a property of the documented algorithm, not of a
// particular standard-library build.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53 random bits.
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    bool coin() { return (next() >> 63) != 0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// Stream i derives its seed as base XOR (golden-ratio constant * i), so any
// number of parallel streams is reproducible from one base seed.
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t stream) {
    return base_seed ^ (kGoldenGamma * stream);
}

// Box-Muller standard normal; u1 is shifted into (0, 1] so log never sees 0.
inline double standard_normal(Xoshiro256pp& rng) {
    const double u1 = double((rng.next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gradpower
