#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace testing {

// Every property test draws from this seed.
inline constexpr std::uint64_t kSeed = 42;

class Gen {
public:
    explicit Gen(std::uint64_t seed = kSeed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double log_uniform(double lo, double hi);

private:
    std::mt19937_64 rng_;
};

inline double Gen::log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

} // namespace testing
