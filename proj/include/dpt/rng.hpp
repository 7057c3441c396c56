#pragma once

#include <cstdint>

namespace dpt {

/// xoshiro256** seeded through splitmix64. Stream k of a seed is the seeded state advanced by
/// k calls to jump() (2^128 draws each), so streams never overlap.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        for (auto& w : s_) {
            seed += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = seed;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
    }

    static Xoshiro256 stream(std::uint64_t seed, int k) {
        Xoshiro256 g(seed);
        for (int i = 0; i < k; ++i) g.jump();
        return g;
    }

    std::uint64_t operator()() {
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

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    void jump() {
        static constexpr std::uint64_t J[] = {0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
                                              0x39abdc4529b1661cULL};
        std::uint64_t t[4] = {0, 0, 0, 0};
        for (std::uint64_t j : J)
            for (int b = 0; b < 64; ++b) {
                if (j & (std::uint64_t{1} << b))
                    for (int i = 0; i < 4; ++i) t[i] ^= s_[i];
                (*this)();
            }
        for (int i = 0; i < 4; ++i) s_[i] = t[i];
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

} // namespace dpt
