/**
 * @file random.hpp
 * @brief Portable seeded random streams.
 *
 * Bits come from std::mt19937_64, whose output sequence is fixed by the C++
 * standard (the 10000th draw of a default-seeded engine is
 * 9981545732273789042). The distributions are implemented here rather than
 * taken from <random>, whose distribution algorithms are left to the
 * library vendor:
 *
 *   uniform()  = (bits >> 11) * 2^-53                       in [0, 1)
 *   normal()   = Box-Muller on u1 = 1 - uniform(), u2 = uniform():
 *                r = sqrt(-2 ln u1); returns r cos(2 pi u2), then r sin(2 pi u2)
 *
 * Any implementation of MT19937-64 plus these two formulas reproduces the
 * same streams.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace focus {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n) by rejection on the top bits; n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do x = engine_();
        while (x >= limit);
        return x % n;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace focus
