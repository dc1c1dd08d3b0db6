#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace r2r {

// SplitMix64 (Steele/Lea/Flood). Used only to expand seeds and derive
// substreams; the simulation generator is xoshiro256** below.
struct SplitMix64 {
    std::uint64_t state = 0;

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256** 1.0 (Blackman/Vigna). Fixed algorithm, so identical seeds
// produce identical streams on every platform. State is seeded from four
// successive SplitMix64 outputs, as recommended by the authors.
class Xoshiro256StarStar {
  public:
    explicit Xoshiro256StarStar(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& word : s_) word = sm.next();
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next() {
        const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

    // Unbiased integer in [0, bound) via Lemire's multiply-shift rejection.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t x = next();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                x = next();
                m = static_cast<unsigned __int128>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0,1) from the top 53 bits.
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::array<std::uint64_t, 4> s_{};
};

// Master seed plus a fixed substream derivation rule. Trajectory i always
// sees the same stream for a given master seed, independent of scheduling,
// so parallel estimators are reproducible by construction.
struct SeedSpec {
    std::uint64_t master = 0;

    // Substream i: xoshiro256** seeded with master + (i+1)*0x9E3779B97F4A7C15.
    Xoshiro256StarStar stream(std::uint64_t index) const {
        return Xoshiro256StarStar(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }
};

}  // namespace r2r
