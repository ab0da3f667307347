#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ordsim {

// Deterministic random source used everywhere randomness is needed.
//
// mt19937_64 output is pinned by the standard, and all derived draws
// (uniform doubles, bounded integers, normals) are produced by our own
// arithmetic rather than std distributions, whose sequences vary between
// standard-library implementations. Identical seeds therefore give
// identical streams on any conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform in [0, n). Rejection sampling, no modulo bias.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = gen_();
            const unsigned __int128 m = static_cast<unsigned __int128>(r) * bound;
            if (static_cast<std::uint64_t>(m) >= threshold) {
                return static_cast<std::size_t>(m >> 64);
            }
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller. Two uniforms per draw, no cached spare.
    double normal() {
        double u1 = uniform();
        const double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return r * std::cos(two_pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

// splitmix64 finalizer; decorrelates nearby seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace ordsim
