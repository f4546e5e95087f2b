#pragma once

#include <cstdint>
#include <random>

namespace castsim {

// Deterministic uniform generator. std::uniform_real_distribution is
// implementation-defined, so doubles are derived from the raw mt19937_64
// stream directly; identical seeds give identical draw sequences on every
// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // RAND(-1, 1) of the sampling rule.
    double symmetric() { return uniform(-1.0, 1.0); }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace castsim
