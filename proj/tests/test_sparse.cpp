#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "osclab/errors.hpp"
#include "osclab/sparse.hpp"

using namespace osclab;

namespace {

OperatorConfig make_cfg() {
    KernelFamily fam;
    return OperatorConfig(fam, GridFamily{Interval{0, 1024}, 0, 10});
}

const DyadicInterval I0{1, 10, 0};

Signal constant(double v) {
    Signal s = Signal::sample(0, 1024, 0.5, [v](double) { return cplx(v); });
    s[0] = 0;
    s[s.size() - 1] = 0;
    return s;
}

}  // namespace

TEST_CASE("sparse form and sparsity oracles") {
    SparseCollection S;
    S.lo = 0;
    S.step = 1;
    S.add(Interval{0, 4}, {CellRange{0, 2}});
    const Signal f = Signal::sample(0, 8, 1, [](double) { return cplx(1); });
    const Signal g = Signal::sample(0, 8, 1, [](double) { return cplx(2); });
    CHECK(sparse_form(S, f, g, 1, 2) == doctest::Approx(8));
    auto c = verify_sparsity(S);
    CHECK(c.ok);
    CHECK(c.eta == doctest::Approx(0.5));

    SparseCollection empty;
    CHECK(verify_sparsity(empty).ok);
    CHECK(verify_sparsity(empty).eta == 1);

    S.add(Interval{0, 8}, {CellRange{1, 6}});
    c = verify_sparsity(S);
    CHECK(!c.disjoint);
    CHECK(!c.ok);

    SparseCollection thin;
    thin.add(Interval{0, 8}, {CellRange{0, 1}});
    CHECK(!verify_sparsity(thin).ok);

    SparseCollection escape;
    escape.add(Interval{0, 4}, {CellRange{3, 6}});
    CHECK_THROWS_AS(verify_sparsity(escape), StructuralError);
}

TEST_CASE("stopping children agree with the scan and cover at most a fifth") {
    gen::Rng r(51);
    for (int t = 0; t < 30; ++t) {
        const Signal f = gen::blocks(r, 0, 1024, 0.5, r.integer(1, 6));
        const Signal g = gen::blocks(r, 0, 1024, 0.5, r.integer(1, 6));
        const auto fast = stopping_children(f, g, I0, 0);
        const auto scan = stopping_children_scan(f, g, I0, 0);
        CHECK(fast == scan);
        double total = 0;
        for (const auto& K : fast) total += K.length();
        CHECK(total <= I0.length() / 5 * 1.05);
        for (std::size_t i = 1; i < fast.size(); ++i) CHECK(fast[i - 1].hi() <= fast[i].lo() + 1e-9);
    }
}

TEST_CASE("constant pair gives a single-node witness") {
    const auto cfg = make_cfg();
    const Signal one = constant(1);
    const auto w = build_sparse_witness(cfg, one, one, I0);
    CHECK(w.collection.size() == 1);
    CHECK(w.report.depth == 0);
    CHECK(verify_sparsity(w.collection).ok);
    CHECK(w.report.eta == doctest::Approx(1).epsilon(0.01));
    CHECK(std::isfinite(w.report.ratio));
}

TEST_CASE("spike chain witness stays sparse") {
    const auto cfg = make_cfg();
    Signal f(0, 1024, 0.5), g = constant(1);
    // Spikes at geometrically shrinking offsets force nested stopping intervals.
    for (double x : {600.25, 700.25, 720.25, 722.25}) f[static_cast<std::size_t>(x / 0.5)] = 2000;
    const auto w = build_sparse_witness(cfg, f, g, I0);
    CHECK(w.collection.size() >= 2);
    const auto c = verify_sparsity(w.collection);
    CHECK(c.ok);
    CHECK(c.eta >= 0.75);
}

TEST_CASE("the form is monotone in the exponents") {
    const auto cfg = make_cfg();
    gen::Rng r(52);
    for (int t = 0; t < 5; ++t) {
        const Signal f = gen::blocks(r, 0, 1024, 0.5, 3), g = gen::blocks(r, 0, 1024, 0.5, 3);
        const auto w = build_sparse_witness(cfg, f, g, I0);
        double prev = 0;
        for (double s : {1.0, 1.5, 2.0, 4.0, 10.0}) {
            const double v = sparse_form(w.collection, f, g, 1, s);
            CHECK(v >= prev * (1 - 1e-12));
            prev = v;
        }
        CHECK(sparse_form(w.collection, f, g, 1, 2) <= sparse_form(w.collection, f, g, 2, 2) * (1 + 1e-12));
    }
}

TEST_CASE("zero pairs are skipped") {
    const auto cfg = make_cfg();
    const Signal z(0, 1024, 0.5);
    gen::Rng r(53);
    const Signal f = gen::blocks(r, 0, 1024, 0.5);
    const auto est = estimate_sparse_constant(cfg, {{z, f}, {f, f}}, I0, 2);
    REQUIRE(est.table.size() == 2);
    CHECK(est.table[0].skipped);
    CHECK(!est.table[1].skipped);
    CHECK(est.worst_ratio == doctest::Approx(est.table[1].ratio));
}

TEST_CASE("sparse family scales") {
    const auto cfg = make_cfg();
    const auto fam = sparse_family(cfg, I0);
    for (const auto& I : fam) {
        CHECK(I.k >= cfg.fam.k0 + 2);
        CHECK(I.inside(I0));
    }
    CHECK(fam.size() == (1u << 6) - 1);  // scales 5..10
}
