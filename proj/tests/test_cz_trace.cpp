#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "osclab/cz_trace.hpp"
#include "osclab/errors.hpp"
#include "osclab/sparse.hpp"

using namespace osclab;

namespace {

OperatorConfig make_cfg() {
    KernelFamily fam;
    return OperatorConfig(fam, GridFamily{Interval{0, 1024}, 0, 10});
}

const DyadicInterval I0{1, 10, 0};

Signal background_with_burst(double height) {
    return Signal::sample(0, 1024, 0.5, [height](double x) {
        if (x < 1 || x > 1023) return cplx(0);
        return cplx(x >= 500 && x < 504 ? height : 1);
    });
}

// Split whose items are the given intervals, all flagged nonstandard.
CollectionSplit manual(const std::vector<DyadicInterval>& Is) {
    CollectionSplit cs;
    for (const auto& I : Is) {
        Classified c;
        c.I = I;
        c.nonstandard = true;
        cs.items.push_back(c);
    }
    return cs;
}

}  // namespace

TEST_CASE("good/bad split of a background with one burst") {
    const Signal f = background_with_burst(400);
    const auto sp = good_bad_split(f, I0, 10, 3, 0);
    REQUIRE(!sp.bad.empty());
    for (const auto& J : sp.bad) {
        CHECK(J.inside(I0));
        CHECK(J.lo() < 504);
        CHECK(J.hi() > 500);
    }
    const auto rep = bad_part_report(sp);
    CHECK(rep.reconstruction_error < 1e-12);
    CHECK(rep.gamma_ratio <= 1);
    CHECK(rep.bsum <= 1 + 1e-9);
    CHECK(AbsIntegral(sp.f).mean(I0.interval()) == doctest::Approx(1));
    CHECK_THROWS_AS(good_bad_split(f, I0, 3, 3, 0), DomainError);
}

TEST_CASE("split properties on random signals") {
    gen::Rng r(61);
    for (int t = 0; t < 20; ++t) {
        const Signal f = gen::blocks(r, 0, 1024, 0.5, r.integer(1, 5));
        const auto sp = good_bad_split(f, I0, 10, 3, 0);
        const auto rep = bad_part_report(sp);
        CHECK(rep.reconstruction_error < 1e-9);
        CHECK(rep.gamma_ratio <= 1 + 1e-12);
        CHECK(rep.bsum <= 1 + 1e-9);
        for (std::size_t i = 1; i < sp.bad.size(); ++i) CHECK(sp.bad[i - 1].hi() <= sp.bad[i].lo() + 1e-9);
    }
}

TEST_CASE("classification partitions the family") {
    const auto cfg = make_cfg();
    const Signal f = background_with_burst(400), g = background_with_burst(1);
    const auto sp = good_bad_split(f, I0, 10, 3, 0);
    const auto fam = trace_family(cfg, sp, g);
    for (int s = 0; s <= 3; ++s) {
        const auto cs = split_standard_nonstandard(cfg, sp, fam, s, 0.834);
        CHECK(cs.items.size() + static_cast<std::size_t>(cs.skipped) == fam.size());
        CHECK(cs.nonstandard_count() + cs.standard_count() == cs.items.size());
    }
    CHECK_THROWS_AS(split_standard_nonstandard(cfg, sp, fam, -1, 0.834), DomainError);
    CHECK_THROWS_AS(split_standard_nonstandard(cfg, sp, fam, 0, 0), DomainError);
}

TEST_CASE("no bad part means everything is standard") {
    const auto cfg = make_cfg();
    const Signal f = background_with_burst(1);
    const auto sp = good_bad_split(f, I0, 10, 3, 0);
    CHECK(sp.bad.empty());
    const auto fam = trace_family(cfg, sp, f);
    CHECK(fam.size() == sparse_family(cfg, I0).size());
    for (int s = 0; s <= 2; ++s) {
        const auto cs = split_standard_nonstandard(cfg, sp, fam, s, 0.834);
        CHECK(cs.nonstandard_count() == 0);
        CHECK(nonstandard_lower_constant(cs) == 0);
        CHECK(carleson_check(cs, fam).worst_ratio == 0);
    }
}

TEST_CASE("exceptional-set overlap counts") {
    const Signal like(0, 1024, 0.5);
    auto cs = manual({{1, 6, 0}, {1, 5, 0}, {1, 5, 1}, {1, 7, 3}});
    cs.s = 0;
    const auto F = exceptional_set(cs, like, I0, 1);
    for (std::size_t n = 0; n < like.size(); ++n) {
        const double x = like.x(static_cast<std::ptrdiff_t>(n));
        int direct = 0;
        for (const auto& it : cs.items) direct += it.I.lo() <= x && x < it.I.hi();
        CHECK(F.overlap[n] == direct);
        CHECK(static_cast<bool>(F.mask[n]) == (direct > 1));
    }
    CHECK(F.fraction == doctest::Approx(64.0 / 1024));
    CHECK_THROWS_AS(exceptional_set(cs, like, I0, 0), DomainError);
}

TEST_CASE("generational layers of an antichain and of a chain") {
    const Signal like(0, 1024, 0.5);
    ExceptionalSet none;
    none.mask.assign(like.size(), 0);

    const auto anti = manual({{1, 5, 0}, {1, 5, 3}, {1, 6, 4}});
    const auto La = generational_layers(anti, none, like, 1);
    REQUIRE(La.K.size() == 1);
    CHECK(La.K[0].size() == 3);

    const auto chain = manual({{1, 8, 0}, {1, 7, 0}, {1, 6, 0}, {1, 5, 0}});
    const auto Lc = generational_layers(chain, none, like, 1);
    REQUIRE(Lc.K.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
        REQUIRE(Lc.K[j].size() == 1);
        CHECK(chain.items[Lc.K[j][0]].I.k == static_cast<int>(5 + j));
    }
    CHECK(Lc.length_violations == 0);

    // Intervals lying inside F are dropped.
    ExceptionalSet all;
    all.mask.assign(like.size(), 1);
    CHECK(generational_layers(chain, all, like, 1).K.empty());
}

TEST_CASE("Bessel diagonal equals the direct sum over layers") {
    const auto cfg = make_cfg();
    gen::Rng r(62);
    for (int t = 0; t < 3; ++t) {
        Signal f = gen::blocks(r, 0, 1024, 0.5, 2);
        for (int b = 0; b < 3; ++b) f[static_cast<std::size_t>(r.integer(100, 1900))] = 3000;
        const auto sp = good_bad_split(f, I0, 10, 3, 0);
        const auto fam = trace_family(cfg, sp, f);
        const auto cs = split_standard_nonstandard(cfg, sp, fam, 1, 0.834);
        const auto F = exceptional_set(cs, f, I0, 4);
        const auto Ls = generational_layers(cs, F, f, 4);
        const auto B = bessel_check(cs, Ls, f, I0, 3, 50, 1);
        CHECK(std::abs(B.diag_sum - B.diag_direct) <= 1e-10 * std::max(1.0, B.diag_direct));
        CHECK(B.worst_norm * B.worst_norm >= B.diag_sum / std::max(1, B.layers) - 1e-9);
    }
}

TEST_CASE("empty layers give zero Bessel quantities") {
    const Signal like(0, 1024, 0.5);
    const CollectionSplit cs;
    const auto B = bessel_check(cs, Layers{}, like, I0, 3, 10, 1);
    CHECK(B.layers == 0);
    CHECK(B.worst_norm == 0);
    CHECK(B.diag_sum == 0);
    CHECK(B.ratio == 0);
}

TEST_CASE("run_trace produces a complete report") {
    const auto cfg = make_cfg();
    const Signal f = background_with_burst(400), g = background_with_burst(1);
    TraceOptions opt;
    opt.c_same = 0.834;
    opt.s_values = {0, 1};
    const auto rep = run_trace(cfg, f, g, I0, opt);
    CHECK(rep.steps.size() == 2);
    CHECK(rep.exceptional_C >= 1);
    const auto j = to_json(rep);
    CHECK(j.contains("steps"));
    CHECK(j.contains("bad_part"));
}
