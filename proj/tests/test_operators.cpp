#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "osclab/errors.hpp"
#include "osclab/operators.hpp"

using namespace osclab;

namespace {

OperatorConfig make_cfg(int d = 2) {
    KernelFamily fam;
    fam.d = d;
    return OperatorConfig(fam, GridFamily{Interval{0, 512}, 0, 9});
}

double l2(const Signal& s) { return norm_p(s, 2); }

}  // namespace

TEST_CASE("T_I of zero is zero and output stays in I") {
    const auto cfg = make_cfg();
    const Signal z(0, 512, 0.25);
    const DyadicInterval I{1, 7, 1};
    CHECK(apply_T_I(cfg, I, z).sup_norm() == 0);
    gen::Rng r(41);
    for (int t = 0; t < 10; ++t) {
        const Signal g = gen::noise(r, 0, 512, 0.25);
        const Signal out = apply_T_I(cfg, I, g);
        for (std::size_t n = 0; n < out.size(); ++n) {
            const double x = out.x(static_cast<std::ptrdiff_t>(n));
            if (x < I.lo() || x >= I.hi()) CHECK(out[n] == cplx(0));
        }
    }
    CHECK_THROWS_AS(apply_T_I(cfg, DyadicInterval{1, 4, 0}, z), DomainError);
}

TEST_CASE("T_I obeys Young's inequality and is linear") {
    const auto cfg = make_cfg();
    const DyadicInterval I{2, 8, 0};
    const double kl1 = cfg.psi_kernel(I.k - 2, 0.25).l1();
    gen::Rng r(42);
    for (int t = 0; t < 10; ++t) {
        const Signal f = gen::noise(r, 0, 512, 0.25), g = gen::noise(r, 0, 512, 0.25);
        Signal fm = Signal::zeros_like(f);
        const auto mc = middle_cells(f, I);
        for (auto m = mc.first; m < mc.last; ++m) fm[static_cast<std::size_t>(m)] = f[static_cast<std::size_t>(m)];
        CHECK(l2(apply_T_I(cfg, I, f)) <= kl1 * l2(fm) * (1 + 1e-12));
        const cplx a(0.3, -1.2);
        const Signal lhs = apply_T_I(cfg, I, a * f + g);
        const Signal rhs = a * apply_T_I(cfg, I, f) + apply_T_I(cfg, I, g);
        CHECK(l2(lhs - rhs) < 1e-12 * (l2(lhs) + 1));
    }
}

TEST_CASE("T_I adjoint") {
    const auto cfg = make_cfg(3);
    const DyadicInterval I{3, 8, 0};
    gen::Rng r(43);
    const Signal g = gen::noise(r, 0, 512, 0.25), h = gen::noise(r, 0, 512, 0.25);
    const Patch Tg = T_I_patch(cfg, I, g);
    const Patch Ah = T_I_adjoint_patch(cfg, I, h);
    cplx lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < Tg.values.size(); ++i)
        lhs += Tg.values[i] * std::conj(h[static_cast<std::size_t>(Tg.first) + i]);
    for (std::size_t i = 0; i < Ah.values.size(); ++i)
        rhs += g[static_cast<std::size_t>(Ah.first) + i] * std::conj(Ah.values[i]);
    REQUIRE(std::abs(lhs) > 0);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("collections and maximal truncation") {
    const auto cfg = make_cfg();
    gen::Rng r(44);
    const Signal f = gen::noise(r, 0, 512, 0.25);
    CHECK(apply_T_collection(cfg, {}, f).sup_norm() == 0);
    CHECK(apply_T_star(cfg, {}, f).sup_norm() == 0);
    const DyadicInterval I{1, 7, 2};
    const Signal single = apply_T_I(cfg, I, f);
    const Signal star = apply_T_star(cfg, {I}, f);
    for (std::size_t n = 0; n < f.size(); ++n) CHECK(star[n].real() == doctest::Approx(std::abs(single[n])));
    // Disjoint intervals of one scale: T_* is |Σ T_I f|.
    const std::vector<DyadicInterval> coll{{1, 6, 0}, {1, 6, 1}, {1, 6, 5}};
    const Signal sum = apply_T_collection(cfg, coll, f);
    const Signal st = apply_T_star(cfg, coll, f);
    for (std::size_t n = 0; n < f.size(); ++n) CHECK(st[n].real() == doctest::Approx(std::abs(sum[n])));
    // Nested scales: the top partial sum is dominated by T_*.
    const std::vector<DyadicInterval> nested{{1, 8, 0}, {1, 7, 0}, {1, 6, 1}};
    const Signal all = apply_T_collection(cfg, nested, f), ns = apply_T_star(cfg, nested, f);
    const Signal top = apply_T_I(cfg, nested[0], f);
    for (std::size_t n = 0; n < f.size(); ++n) {
        CHECK(ns[n].real() >= std::abs(all[n]) - 1e-12);
        CHECK(ns[n].real() >= std::abs(top[n]) - 1e-12);
    }
}

TEST_CASE("H_eps oracles") {
    const auto cfg = make_cfg();
    const Signal z(0, 256, 0.25);
    CHECK(apply_H_trunc(cfg, z, 1).sup_norm() == 0);
    const Signal f = Signal::sample(0, 256, 0.25, [](double x) { return cplx(x >= 100 && x < 108 ? 1 : 0); });
    CHECK(apply_H_trunc(cfg, f, 300).sup_norm() == 0);
    CHECK_THROWS_AS(apply_H_trunc(cfg, f, 0), DomainError);
    const Signal bad = Signal::sample(0, 256, 0.25, [](double) { return cplx(1); });
    CHECK_THROWS_AS(apply_H_trunc(cfg, bad, 1), RangeError);
}

TEST_CASE("H_eps of an indicator against a fine Riemann sum") {
    const auto cfg = make_cfg(2);
    const Signal f = Signal::sample(0, 256, 0.25, [](double x) { return cplx(x >= 100 && x < 108 ? 1 : 0); });
    const Signal H = apply_H_trunc(cfg, f, 4);
    const double x = 120.125;
    const auto n = static_cast<std::size_t>(cell_range(H, Interval{x, x + 0.25}).first);
    // y ranges over (x − 108, x − 100], all above eps.
    const int steps = 2000000;
    const double a = x - 108, b = x - 100, dy = (b - a) / steps;
    cplx acc = 0;
    for (int i = 0; i < steps; ++i) {
        const double y = a + (i + 0.5) * dy;
        acc += expi(frac_pow(y, 2)) / y;
    }
    acc *= dy;
    CHECK(std::abs(H[n] - acc) < 1e-6);
}

TEST_CASE("H_* is monotone in the truncation set") {
    const auto cfg = make_cfg();
    gen::Rng r(45);
    const Signal f = gen::blocks(r, 0, 256, 0.25);
    const Signal H1 = apply_H_star(cfg, f, {8});
    const Signal T1 = apply_H_trunc(cfg, f, 8);
    for (std::size_t n = 0; n < f.size(); ++n) CHECK(H1[n].real() == doctest::Approx(std::abs(T1[n])));
    const Signal H2 = apply_H_star(cfg, f, {8, 2, 32});
    const Signal H3 = apply_H_star(cfg, f, default_eps_set(f));
    for (std::size_t n = 0; n < f.size(); ++n) {
        CHECK(H2[n].real() >= H1[n].real() - 1e-12);
        CHECK(H3[n].real() >= H2[n].real() - 1e-12);
    }
    // Below half a cell the odd kernel cancels on the central cell, so finer truncations add nothing.
    auto eps = default_eps_set(f);
    eps.push_back(f.step() / 2);
    const Signal H3b = apply_H_star(cfg, f, eps);
    eps.push_back(f.step() / 4);
    eps.push_back(f.step() / 16);
    const Signal H4 = apply_H_star(cfg, f, eps);
    for (std::size_t n = 0; n < f.size(); ++n) CHECK(H4[n].real() == doctest::Approx(H3b[n].real()).epsilon(1e-9));
}

TEST_CASE("small-scale parts") {
    const auto cfg = make_cfg();
    const Signal z(0, 256, 0.25);
    const auto s0 = small_scale_split(cfg, z);
    CHECK(s0.cz_part.sup_norm() == 0);
    CHECK(s0.hl_part_bound.sup_norm() == 0);
    gen::Rng r(46);
    for (int t = 0; t < 5; ++t) {
        const Signal f = gen::blocks(r, 0, 256, 0.25);
        const auto ss = small_scale_split(cfg, f);
        const Signal mid = middle_part(cfg, f);
        for (std::size_t n = 0; n < f.size(); ++n) CHECK(std::abs(mid[n]) <= ss.hl_part_bound[n].real() * (1 + 1e-9));
    }
}

TEST_CASE("single-scale norms are bounded and stable across scales") {
    const auto cfg = make_cfg();
    const Signal like(0, 512, 0.5);
    for (int K = 6; K <= 8; ++K) {
        const double nrm = single_scale_norm(cfg, like, 1, K);
        CHECK(nrm > 0);
        CHECK(nrm <= cfg.psi_kernel(K - 2, 0.5).l1() * (1 + 1e-9));
    }
}
