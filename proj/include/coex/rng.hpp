#pragma once
#include <cmath>
#include <cstdint>
#include <random>

#include "coex/errors.hpp"

namespace coex {

// Stateless 64-bit mixer (splitmix64). Used to expand a (seed, stream) pair
// into independent generator states.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Per-stream deterministic RNG. A master seed and a stream id (e.g. the AP
// index) derive an mt19937_64; every distribution below is hand-rolled on the
// raw 64-bit output so sequences are bit-identical across platforms and
// standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0xA0761D6478BD642Full * (stream + 1));
        const std::uint64_t a = splitmix64_next(x);
        const std::uint64_t b = splitmix64_next(x);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        gen_.seed(seq);
    }

    std::uint64_t next_u64() { return gen_(); }

    // Unbiased uniform integer in [0, n) by fixed-threshold rejection.
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0) throw InvalidParameter("Rng::bounded: n must be >= 1");
        if ((n & (n - 1)) == 0) return gen_() & (n - 1);  // power of two: mask
        const std::uint64_t threshold = (0 - n) % n;      // 2^64 mod n
        for (;;) {
            const std::uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Exponential variate with the given mean (inverse CDF on 1-U, so the
    // argument of log never reaches zero).
    double exponential(double mean) {
        if (mean <= 0) throw InvalidParameter("Rng::exponential: mean must be > 0");
        return -std::log(1.0 - uniform01()) * mean;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace coex
