#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

namespace anchord {

// Portable seeded random number generation. Everything downstream that
// draws random numbers (pixel sampling, synthetic scenes) goes through
// this generator so results are bit-identical across platforms and
// standard library implementations (std:: distributions are not
// portable, the engines are).
//
// Generator: xoshiro256** 1.0 (public domain, Blackman & Vigna), state
// seeded by splitmix64. State advance per draw:
//   result = rotl(s1 * 5, 7) * 9
//   t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t;
//   s3 = rotl(s3, 45)
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed into the four state words.
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Unbiased integer in [0, n), n > 0. Lemire's multiply-shift with
    /// rejection.
    std::uint64_t below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal variate via Box-Muller; the second variate of each
    /// pair is cached, so draws consume one or zero uniforms pairs.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        // Shifted into (0,1) so log() never sees zero.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    /// First `count` entries of a random permutation of [0, population),
    /// via partial Fisher-Yates. count <= population.
    std::vector<int> sample_without_replacement(int population, int count) {
        std::vector<int> indices(static_cast<std::size_t>(population));
        std::iota(indices.begin(), indices.end(), 0);
        for (int i = 0; i < count; ++i) {
            const auto j = i + static_cast<int>(below(static_cast<std::uint64_t>(population - i)));
            std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
        }
        indices.resize(static_cast<std::size_t>(count));
        return indices;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4] = {};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace anchord
