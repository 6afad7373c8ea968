#pragma once

// Deterministic sampling on top of mt19937_64. std:: distributions are
// implementation-defined, so uniform/normal draws are generated explicitly
// to keep fixed-seed runs reproducible across standard libraries.

#include <cmath>
#include <cstdint>
#include <random>

namespace infosig {

class rng {
  public:
    explicit rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold)
                return r % n;
        }
    }

    double uniform_range(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Box-Muller; one normal per uniform pair keeps the draw count fixed.
    double normal(double sigma) {
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;       // [0, 1)
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace infosig
