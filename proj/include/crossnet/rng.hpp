// rng.hpp — seeded random draws for property tests and experiment sampling.
// std::mt19937_64 is bit-exact across platforms, but the standard library
// distributions are not, so the uniform mappings live here.
#pragma once

#include <cstdint>
#include <random>

#include "crossnet/geometry.hpp"

namespace crossnet {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // modulo bias is irrelevant at test sample sizes; keep it reproducible
        return eng_() % n;
    }

    Vec2 point_in_box(double lo, double hi) {
        const double a = uniform(lo, hi);
        const double b = uniform(lo, hi);
        return {a, b};
    }

    Vec2 point_in_box(Vec2 lo, Vec2 hi) {
        const double a = uniform(lo.x1, hi.x1);
        const double b = uniform(lo.x2, hi.x2);
        return {a, b};
    }

    // direction on the unit circle
    Vec2 direction() {
        const double th = uniform(0.0, 6.283185307179586);
        return {std::cos(th), std::sin(th)};
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace crossnet
