#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace choroid {

/// splitmix64 step; used to derive independent per-item seeds from a master seed.
inline uint64_t split_seed(uint64_t master, uint64_t index) {
    uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// mt19937_64 with explicit variate transforms. std::*_distribution is
/// implementation-defined; the transforms here pin the byte-level output
/// for a given seed to the engine alone, which the standard fully specifies.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform in [0,1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one variate per call, two uniforms consumed.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        // modulo bias is irrelevant at the sizes used here
        return eng_() % n;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace choroid
