#pragma once

#include <cstdint>
#include <random>

namespace caproj {

/// Deterministic uniform generator. Draws are derived from raw mt19937_64
/// output instead of std::uniform_real_distribution so that a given seed
/// reproduces the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return engine_() % n; }

    /// Random sign, +1 or -1.
    double sign() { return (engine_() & 1u) ? 1.0 : -1.0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace caproj
