#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace rqv {

/// Seeded generator with distribution helpers defined by explicit formulas,
/// so sequences are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Exponential with the given rate (> 0).
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    /// Uniform index in [0, n), n > 0.
    std::size_t index(std::size_t n) {
        const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace rqv
