#pragma once

#include <cstdint>

namespace otlab {

// splitmix64-seeded xoshiro256**. Self-contained so that seeded streams are
// bit-identical across platforms and standard library versions (the
// distributions in <random> are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& si : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            std::uint64_t w = z;
            w = (w ^ (w >> 30)) * 0xbf58476d1ce4e5b9ULL;
            w = (w ^ (w >> 27)) * 0x94d049bb133111ebULL;
            si = w ^ (w >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace otlab
