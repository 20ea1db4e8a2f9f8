#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace weave {

/// Seeded random stream. The engine (mt19937_64) is fully specified by the
/// standard and the variate transforms are hand-rolled, so a given seed
/// produces the same sequence on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    /// Exponential with the given mean (mean <= 0 returns 0).
    double exponential(double mean) {
        if (mean <= 0.0) return 0.0;
        return -mean * std::log1p(-uniform01());
    }

    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        return n == 0 ? 0 : engine_() % n;
    }

    /// Derives an independent stream seed from a base seed and a path of
    /// indices (splitmix64 over the concatenation).
    static std::uint64_t derive(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
        std::uint64_t x = base;
        for (std::uint64_t p : path) x = mix(x ^ mix(p));
        return mix(x);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace weave
