#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "gen.hpp"
#include "osclab/core.hpp"
#include "osclab/errors.hpp"

using namespace osclab;

namespace {

Signal indicator(double lo, double hi, double h, double a, double b) {
    return Signal::sample(lo, hi, h, [&](double x) { return cplx(x >= a && x < b ? 1.0 : 0.0); });
}

// max over cell intervals containing cell n of the average of |f|.
double brute_maximal(const Signal& f, std::size_t n) {
    double best = 0;
    for (std::size_t s = 0; s <= n; ++s)
        for (std::size_t e = n + 1; e <= f.size(); ++e) {
            double sum = 0;
            for (std::size_t i = s; i < e; ++i) sum += std::abs(f[i]);
            best = std::max(best, sum / static_cast<double>(e - s));
        }
    return best;
}

}  // namespace

TEST_CASE("signal construction") {
    Signal s(0, 1, 0.125);
    CHECK(s.size() == 8);
    CHECK(s.x(0) == doctest::Approx(0.0625));
    CHECK_THROWS_AS(Signal(0, 1, 0), DomainError);
    CHECK_THROWS_AS(Signal(1, 0, 0.1), DomainError);
    CHECK_THROWS_AS(Signal(0, 1, 0.5, {1.0, std::nan("")}), DomainError);
    CHECK_THROWS_AS(Signal(0, 1, 0.5, {1.0}), DomainError);
}

TEST_CASE("integrate oracles") {
    const double h = 1.0 / 256;
    CHECK(std::abs(integrate(Signal(0, 1, h), 0, 1)) == 0);
    CHECK(integrate(Signal::sample(0, 1, h, [](double) { return cplx(1); }), 0, 1).real() == doctest::Approx(1).epsilon(1e-12));
    CHECK(std::abs(integrate(Signal::sample(0, 1, h, [](double x) { return cplx(x); }), 0, 1).real() - 0.5) <= h * h);
    // Partial cells count proportionally.
    const Signal one = Signal::sample(0, 1, 0.25, [](double) { return cplx(1); });
    CHECK(integrate(one, 0.1, 0.6).real() == doctest::Approx(0.5));
}

TEST_CASE("integrate is linear") {
    gen::Rng r(11);
    for (int t = 0; t < 50; ++t) {
        const Signal f = gen::noise(r, -2, 2, 1.0 / 32), g = gen::noise(r, -2, 2, 1.0 / 32);
        const double a = r.uniform(-1, 1), b = r.uniform(-1.9, 1.9);
        const double lo = r.uniform(-2, 0), hi = r.uniform(0, 2);
        const cplx lhs = integrate(cplx(a) * f + cplx(b) * g, lo, hi);
        const cplx rhs = a * integrate(f, lo, hi) + b * integrate(g, lo, hi);
        CHECK(std::abs(lhs - rhs) < 1e-12 * (std::abs(a) * f.sup_norm() + std::abs(b) * g.sup_norm()) * (hi - lo) + 1e-15);
    }
}

TEST_CASE("integrate refinement is second order on sin") {
    auto err = [](double h) {
        const Signal s = Signal::sample(0, 3, h, [](double x) { return cplx(std::sin(x)); });
        return std::abs(integrate(s, 0, 3).real() - (1 - std::cos(3.0)));
    };
    const double e1 = err(1.0 / 16), e2 = err(1.0 / 32);
    CHECK(e1 / e2 == doctest::Approx(4).epsilon(0.05));
}

TEST_CASE("average_r oracles") {
    const double h = 1.0 / 64;
    const Interval I{0, 1};
    CHECK(average_r(indicator(-1, 2, h, 0, 1), I, 1) == doctest::Approx(1));
    CHECK(average_r(indicator(-1, 2, h, 0, 1), I, 3.5) == doctest::Approx(1));
    const Signal half = indicator(-1, 2, h, 0, 0.5);
    CHECK(average_r(half, I, 1) == doctest::Approx(0.5));
    CHECK(average_r(half, I, 2) == doctest::Approx(std::sqrt(0.5)));
    CHECK(average_r(Signal(-1, 2, h), I, 2) == 0);
}

TEST_CASE("average_r is monotone in r") {
    gen::Rng r(12);
    for (int t = 0; t < 100; ++t) {
        const Signal f = gen::blocks(r, 0, 8, 1.0 / 16);
        const double lo = r.uniform(0, 4);
        const Interval I{lo, lo + r.uniform(0.5, 4)};
        const double r1 = r.uniform(1, 3), r2 = r1 + r.uniform(0, 3);
        CHECK(average_r(f, I, r1) <= average_r(f, I, r2) + 1e-10);
    }
}

TEST_CASE("hl_maximal oracles") {
    const double h = 1.0 / 64;
    const Signal c = Signal::sample(-1, 1, h, [](double) { return cplx(2.5); });
    const Signal Mc = hl_maximal(c);
    for (std::size_t n = 0; n < Mc.size(); ++n) CHECK(Mc[n].real() == doctest::Approx(2.5));
    const Signal f = indicator(-4, 4, h, 0, 1);
    const Signal M = hl_maximal(f);
    // Best interval containing the cell at 2 is [0, 2 + h), so the value is 1/(2 + h).
    const auto n = static_cast<std::size_t>(cell_range(M, Interval{2, 2 + h}).first);
    CHECK(std::abs(M[n].real() - 0.5) <= 2 * h);
    CHECK(hl_maximal(Signal(0, 1, h)).sup_norm() == 0);
}

TEST_CASE("hl_maximal matches brute force and dominates |f|") {
    gen::Rng r(13);
    for (int t = 0; t < 20; ++t) {
        const Signal f = gen::noise(r, 0, 1, 1.0 / 24);
        const Signal M = hl_maximal(f);
        for (std::size_t n = 0; n < f.size(); ++n) {
            CHECK(M[n].real() >= std::abs(f[n]) - 1e-15);
            CHECK(M[n].real() == doctest::Approx(brute_maximal(f, n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("AbsIntegral matches direct sums") {
    gen::Rng r(14);
    const Signal f = gen::noise(r, -1, 3, 1.0 / 16);
    const AbsIntegral A(f, 2);
    for (int t = 0; t < 50; ++t) {
        const double a = r.uniform(-2, 3), b = a + r.uniform(0, 2);
        double direct = 0;
        for (std::size_t n = 0; n < f.size(); ++n) {
            const double c0 = f.lo() + static_cast<double>(n) * f.step(), c1 = c0 + f.step();
            const double ov = std::max(0.0, std::min(b, c1) - std::max(a, c0));
            direct += std::norm(f[n]) * ov;
        }
        CHECK(A.integral(a, b) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("norms and inner product") {
    const Signal f = Signal::sample(0, 1, 0.25, [](double x) { return cplx(x < 0.5 ? 2 : 0); });
    CHECK(norm_p(f, 1) == doctest::Approx(1));
    CHECK(norm_p(f, 2) == doctest::Approx(std::sqrt(2)));
    CHECK(norm_p(f, INFINITY) == 2);
    CHECK(inner(f, f).real() == doctest::Approx(2));
}

TEST_CASE("csv round trip") {
    gen::Rng r(15);
    const Signal f = gen::noise(r, -1, 1, 0.125);
    const auto path = (std::filesystem::temp_directory_path() / "osclab_core_rt.csv").string();
    write_csv(f, path, true);
    const Signal g = read_csv(path);
    REQUIRE(g.size() == f.size());
    CHECK(g.lo() == doctest::Approx(f.lo()));
    for (std::size_t n = 0; n < f.size(); ++n) CHECK(std::abs(g[n] - f[n]) < 1e-12);
    std::remove(path.c_str());
}
