#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "osclab/dyadic.hpp"
#include "osclab/errors.hpp"

using namespace osclab;

TEST_CASE("grid offsets") {
    CHECK(DyadicInterval{1, 3, 2}.lo() == 16);
    CHECK(DyadicInterval{2, 0, 0}.lo() == doctest::Approx(1.0 / 3));   // (−1)^0 = +1
    CHECK(DyadicInterval{2, 1, 0}.lo() == doctest::Approx(-2.0 / 3));  // (−1)^1 = −1
    CHECK(DyadicInterval{3, 2, 1}.lo() == doctest::Approx(4 * (1 + 2.0 / 3)));
    CHECK(DyadicInterval{3, 2, 1}.length() == 4);
}

TEST_CASE("children split the parent in halves, on every grid") {
    gen::Rng r(31);
    for (int t = 0; t < 2000; ++t) {
        const DyadicInterval I{r.integer(1, 3), r.integer(-4, 12), r.integer(-50, 50)};
        const auto [a, b] = I.children();
        CHECK(a.lo() == doctest::Approx(I.lo()));
        CHECK(a.hi() == doctest::Approx(b.lo()));
        CHECK(b.hi() == doctest::Approx(I.hi()));
        CHECK(a.parent() == I);
        CHECK(b.parent() == I);
        CHECK(a.inside(I));
        CHECK(!I.inside(a));
    }
}

TEST_CASE("middle third") {
    const auto m = DyadicInterval{1, 3, 0}.middle_third();
    CHECK(m.lo == doctest::Approx(8.0 / 3));
    CHECK(m.hi == doctest::Approx(16.0 / 3));
}

TEST_CASE("middle thirds of the three grids partition the line") {
    gen::Rng r(32);
    for (int k = -2; k <= 12; ++k) {
        std::vector<double> xs;
        for (int i = 0; i < 10000; ++i) xs.push_back(r.uniform(-5000, 5000));
        CHECK(partition_violations(k, xs) == 0);
    }
}

TEST_CASE("same-grid intervals are nested or disjoint") {
    gen::Rng r(33);
    for (int t = 0; t < 100000; ++t) {
        const int g = r.integer(1, 3);
        const DyadicInterval I{g, r.integer(0, 8), r.integer(-20, 20)};
        const DyadicInterval J{g, r.integer(0, 8), r.integer(-20, 20)};
        const double lo = std::max(I.lo(), J.lo()), hi = std::min(I.hi(), J.hi());
        if (hi > lo + 1e-9) {
            const bool nested = I.inside(J) || J.inside(I);
            CHECK(nested);
        }
    }
}

TEST_CASE("locate contains the point and is consistent with ancestors") {
    gen::Rng r(34);
    for (int t = 0; t < 5000; ++t) {
        const double x = r.uniform(-1000, 1000);
        const int g = r.integer(1, 3), k = r.integer(0, 10);
        const auto I = locate(g, k, x);
        CHECK(I.lo() <= x);
        CHECK(x < I.hi());
        CHECK(locate(g, k + 1, x) == I.parent());
        CHECK(I.ancestor(k + 3) == locate(g, k + 3, x));
    }
}

TEST_CASE("maximal_intervals oracles") {
    const DyadicInterval top{1, 4, 0};
    const auto all = descendants(top, 0);
    CHECK(all.size() == 31);
    CHECK(maximal_intervals(all, [](const auto&) { return false; }).empty());
    const auto everything = maximal_intervals(all, [](const auto&) { return true; });
    REQUIRE(everything.size() == 1);
    CHECK(everything[0] == top);
    // Scale-0 intervals alone are already maximal.
    const auto leaves = maximal_intervals(all, [](const auto& I) { return I.k == 0; });
    CHECK(leaves.size() == 16);
    CHECK_THROWS_AS(maximal_intervals({DyadicInterval{1, 0, 0}, DyadicInterval{2, 0, 0}},
                                      [](const auto&) { return true; }),
                    DomainError);
}

TEST_CASE("maximal_subintervals agrees with brute force") {
    gen::Rng r(35);
    const DyadicInterval I0{1, 6, 0};
    for (int t = 0; t < 200; ++t) {
        std::vector<char> mark(200, 0);
        const auto all = descendants(I0, 0);
        for (std::size_t i = 1; i < all.size(); ++i) mark[i] = r.coin(0.1);
        auto pred = [&](const DyadicInterval& I) {
            const auto it = std::find(all.begin(), all.end(), I);
            return it != all.end() && mark[static_cast<std::size_t>(it - all.begin())];
        };
        auto got = maximal_subintervals(I0, 0, pred);
        std::vector<DyadicInterval> want;
        for (std::size_t i = 1; i < all.size(); ++i) {
            if (!pred(all[i])) continue;
            bool covered = false;
            for (std::size_t j = 1; j < all.size(); ++j)
                if (j != i && pred(all[j]) && all[i].inside(all[j])) covered = true;
            if (!covered) want.push_back(all[i]);
        }
        std::sort(want.begin(), want.end(), [](const auto& a, const auto& b) { return a.lo() < b.lo(); });
        CHECK(got == want);
    }
}

TEST_CASE("grids_at_scale covers the window") {
    GridFamily g{Interval{0, 64}, 0, 6};
    for (int k = 0; k <= 6; ++k)
        for (int grid = 1; grid <= 3; ++grid) {
            const auto v = grid_at_scale(g, grid, k);
            REQUIRE(!v.empty());
            for (double x = 0.25; x < 64; x += 0.5) {
                const bool hit = std::any_of(v.begin(), v.end(), [&](const auto& I) { return I.lo() <= x && x < I.hi(); });
                CHECK(hit);
            }
        }
    CHECK_THROWS_AS(grid_at_scale(g, 1, 7), DomainError);
}
