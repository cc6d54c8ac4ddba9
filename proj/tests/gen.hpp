#pragma once

// Small hand-rolled generators for property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "osclab/core.hpp"

namespace gen {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform(double a = 0, double b = 1) { return std::uniform_real_distribution<double>(a, b)(eng); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
    bool coin(double p = 0.5) { return uniform() < p; }
};

// Nonnegative step signal on [lo, hi) made of a few random blocks, zero on the boundary cells.
inline osclab::Signal blocks(Rng& r, double lo, double hi, double h, int count = 4) {
    osclab::Signal s(lo, hi, h);
    const auto N = static_cast<int>(s.size());
    for (int b = 0; b < count; ++b) {
        const int len = r.integer(1, std::max(1, N / 8));
        const int at = r.integer(1, std::max(1, N - 1 - len));
        const double v = r.uniform(0.1, 4);
        for (int n = at; n < at + len && n < N - 1; ++n) s[static_cast<std::size_t>(n)] += v;
    }
    return s;
}

// Complex random signal, nonzero everywhere except the boundary cells.
inline osclab::Signal noise(Rng& r, double lo, double hi, double h) {
    osclab::Signal s(lo, hi, h);
    for (std::size_t n = 1; n + 1 < s.size(); ++n) s[n] = {r.uniform(-1, 1), r.uniform(-1, 1)};
    return s;
}

}  // namespace gen
