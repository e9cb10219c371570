#pragma once

#include <cmath>
#include <cstdint>

#include "looplab/vec3.hpp"

namespace looplab {

// Counter-based generator built on the SplitMix64 finalizer
// (Steele, Lea, Flood 2014): increment 0x9E3779B97F4A7C15, multipliers
// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB. Draw n of stream s under seed
// is mix(key(seed, s) + (n + 1) * increment), so any draw can be computed
// independently of the others.
class CounterRng {
public:
    static constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

    constexpr std::uint64_t at(std::uint64_t n) const { return mix(key_ + (n + 1) * kIncrement); }

    // Uniform in (0, 1]: 53 random bits.
    double uniform_at(std::uint64_t n) const {
        return (static_cast<double>(at(n) >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal pair by Box-Muller from uniforms 2n and 2n+1.
    void normal_pair_at(std::uint64_t n, double& z0, double& z1) const {
        const double u1 = uniform_at(2 * n);
        const double u2 = uniform_at(2 * n + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * kPi * u2;
        z0 = r * std::cos(th);
        z1 = r * std::sin(th);
    }

    // Sequential interface.
    std::uint64_t next() { return at(counter_++); }
    double uniform() { return uniform_at(counter_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
    Vec3 uniform_vec(double lo, double hi) {
        const double x = uniform(lo, hi);
        const double y = uniform(lo, hi);
        const double z = uniform(lo, hi);
        return {x, y, z};
    }
    Vec3 normal_vec() {
        const double x = normal();
        const double y = normal();
        const double z = normal();
        return {x, y, z};
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace looplab
