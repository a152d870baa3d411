#pragma once

#include "ldr/types.hpp"

#include <cstdint>
#include <random>

namespace ldr {

/// Derive an independent stream seed from a base seed. splitmix64 of the
/// xor keeps streams decorrelated while staying reproducible across
/// platforms and runs.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base ^ (stream + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random source. Distributions are implemented by hand
/// (ldexp mapping, Box-Muller) so that generated sequences depend only on
/// the mt19937_64 stream, not on standard-library internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1).
    double uniform() { return std::ldexp(static_cast<double>(gen_() >> 11), -53); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Vec normal_vec(Index n) {
        Vec v(n);
        for (Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    Vec uniform_vec(Index n, double lo, double hi) {
        Vec v(n);
        for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    /// Uniform point in the ball of the given radius: gaussian direction,
    /// radius corrected by u^(1/n).
    Vec ball_point(Index n, double radius) {
        Vec dir = normal_vec(n);
        double norm = dir.norm();
        while (norm == 0.0) {
            dir = normal_vec(n);
            norm = dir.norm();
        }
        const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
        return (r / norm) * dir;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace ldr
