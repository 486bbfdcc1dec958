#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace fieldline::testing {

/// |a - b| <= tol * max(1, |b|)
inline bool near(double a, double b, double tol)
{
    return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
}

/// seeded draws for property tests; every test owns its generator so the order
/// in which doctest runs the cases does not change the inputs
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    int sign() { return integer(0, 1) ? 1 : -1; }

private:
    std::mt19937_64 rng_;
};

}  // namespace fieldline::testing
