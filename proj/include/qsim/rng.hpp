#pragma once

#include <cstdint>
#include <cmath>

namespace qsim::rng {

/// Counter-based random stream: every value is a pure function of
/// (seed, stream, counter), so independent streams drawn from the same
/// seed are reproducible regardless of evaluation order or threading.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream = 0)
        : base_(mix(seed ^ mix(stream ^ 0x9E3779B97F4A7C15ull))) {}

    std::uint64_t next_u64() {
        std::uint64_t z = base_ + (++counter_) * 0x9E3779B97F4A7C15ull;
        return mix(z);
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double uniform_open() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform_open();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925287 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t base_;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace qsim::rng
