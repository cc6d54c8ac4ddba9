#include "osclab/cz_trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "osclab/errors.hpp"
#include "osclab/parallel.hpp"
#include "osclab/sparse.hpp"
#include "osclab/stats.hpp"

namespace osclab {

const Signal& GoodBadSplit::B_at(int k) const {
    auto it = B.find(k);
    return it == B.end() ? zero : it->second;
}

GoodBadSplit good_bad_split(const Signal& f, const DyadicInterval& I0, double K, int k0, int k_min) {
    if (!(K > 4)) throw DomainError("good/bad threshold K must exceed 4");
    GoodBadSplit out;
    out.I0 = I0;
    out.K = K;
    out.k0 = k0;
    out.zero = Signal::zeros_like(f);
    out.f = Signal::zeros_like(f);
    const CellRange oc = cells(f, I0);
    const double avg = AbsIntegral(f).mean(I0.interval());
    out.scale = avg > 0 ? 1 / avg : 1;
    for (auto n = oc.first; n < oc.last; ++n)
        out.f[static_cast<std::size_t>(n)] = f[static_cast<std::size_t>(n)] * out.scale;
    out.b = Signal::zeros_like(f);
    if (avg > 0) {
        const AbsIntegral F(out.f);
        out.bad = maximal_subintervals(I0, finest_scale(f, k_min),
                                       [&](const DyadicInterval& J) { return F.mean(J.interval()) > K; });
    }
    for (const auto& J : out.bad) {
        const int k = std::max(k0, J.k);
        auto it = out.B.find(k);
        if (it == out.B.end()) it = out.B.emplace(k, Signal::zeros_like(f)).first;
        const CellRange c = cells(f, J);
        for (auto n = c.first; n < c.last; ++n) {
            const auto i = static_cast<std::size_t>(n);
            it->second[i] = out.f[i];
            out.b[i] = out.f[i];
        }
    }
    out.gamma = out.f - out.b;
    return out;
}

BadPartReport bad_part_report(const GoodBadSplit& split) {
    BadPartReport r;
    const double h = split.f.step();
    Signal rest = split.f - split.gamma;
    long double bsum = 0;
    for (const auto& [k, Bk] : split.B) {
        rest -= Bk;
        std::vector<double> a = Bk.abs_values();
        for (double v : a) bsum += v * h;
        const Prefix P(a);
        const auto w = std::max<std::ptrdiff_t>(1, std::llround(std::ldexp(1.0, k) / h));
        const auto N = static_cast<std::ptrdiff_t>(a.size());
        double best = 0;
        for (std::ptrdiff_t i = 0; i + w <= N || i == 0; ++i) best = std::max(best, P.sum(i, std::min(N, i + w)));
        r.bi_ratio[k] = best * h / std::ldexp(1.0, k);
    }
    r.reconstruction_error = rest.sup_norm();
    r.gamma_ratio = split.gamma.sup_norm() / (2 * split.K);
    r.bsum = static_cast<double>(bsum) / split.I0.length();
    return r;
}

std::vector<DyadicInterval> trace_family(const OperatorConfig& cfg, const GoodBadSplit& split, const Signal& g) {
    const AbsIntegral F(split.f), G(g);
    const double tg = split.K * G.mean(split.I0.interval());
    auto small = [&](const DyadicInterval& I) { return F.mean(I.interval()) <= split.K && G.mean(I.interval()) <= tg; };
    std::vector<DyadicInterval> out;
    for (const auto& I : sparse_family(cfg, split.I0)) {
        bool keep = true;
        for (DyadicInterval A = I; A.k < split.I0.k && keep; A = A.parent()) keep = small(A);
        if (keep) out.push_back(I);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.k != b.k ? a.k < b.k : a.n < b.n; });
    return out;
}

std::size_t CollectionSplit::nonstandard_count() const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const auto& c) { return c.nonstandard; }));
}

namespace {

Signal with_patch(const Signal& like, const Patch& p) {
    Signal out = Signal::zeros_like(like);
    for (std::size_t i = 0; i < p.values.size(); ++i) out[static_cast<std::size_t>(p.first) + i] = p.values[i];
    return out;
}

void add_patch(std::vector<cplx>& acc, const Patch& p) {
    for (std::size_t i = 0; i < p.values.size(); ++i) acc[static_cast<std::size_t>(p.first) + i] += p.values[i];
}

double norm2_sq(const Patch& p, double h) {
    long double acc = 0;
    for (const auto& v : p.values) acc += std::norm(v);
    return static_cast<double>(acc) * h;
}

Classified classify(const OperatorConfig& cfg, const DyadicInterval& I, const Signal& Bm, double c_same,
                    NonStandardTest test) {
    Classified c;
    c.I = I;
    const double h = Bm.step();
    const CellRange oc = cells(Bm, I), mc = middle_cells(Bm, I);
    for (auto n = oc.first; n < oc.last; ++n) c.mass += Bm[static_cast<std::size_t>(n)].real() * h;
    bool any = false;
    for (auto n = mc.first; n < mc.last && !any; ++n) any = Bm[static_cast<std::size_t>(n)] != cplx(0);
    c.TB.first = oc.first;
    if (!any) return c;  // tie: both sides vanish, counted as standard
    c.TB = T_I_patch(cfg, I, Bm);
    const Patch u = T_I_adjoint_patch(cfg, I, with_patch(Bm, c.TB));
    std::vector<cplx> local(static_cast<std::size_t>(mc.size()));
    for (auto n = mc.first; n < mc.last; ++n) local[static_cast<std::size_t>(n - mc.first)] = Bm[static_cast<std::size_t>(n)];
    const AbsIntegral L(Signal(Bm.x(mc.first) - h / 2, Bm.x(mc.last) - h / 2, h, local));
    const double coef = 100 * c_same / I.length();
    if (test == NonStandardTest::Paired) {
        long double lhs = 0, rhs = 0;
        for (auto n = mc.first; n < mc.last; ++n) {
            const auto i = static_cast<std::size_t>(n - mc.first);
            const double x = Bm.x(n), bn = std::abs(local[i]);
            lhs += std::abs(u.values[i]) * bn;
            rhs += coef * L.integral(x - 0.5, x + 0.5) * bn;
        }
        c.lhs = static_cast<double>(lhs * h);
        c.rhs = static_cast<double>(rhs * h);
        c.nonstandard = c.lhs < c.rhs;
    } else {
        double worst = 0;
        bool ok = true;
        for (auto n = mc.first; n < mc.last; ++n) {
            const auto i = static_cast<std::size_t>(n - mc.first);
            const double x = Bm.x(n);
            const double a = std::abs(u.values[i]), b = coef * L.integral(x - 0.5, x + 0.5);
            if (a > b) ok = false;
            if (b > 0) worst = std::max(worst, a / b);
            else if (a > 0) worst = std::numeric_limits<double>::infinity();
        }
        c.lhs = worst;
        c.rhs = 1;
        c.nonstandard = ok && worst < 1;
    }
    return c;
}

}  // namespace

CollectionSplit split_standard_nonstandard(const OperatorConfig& cfg, const GoodBadSplit& split,
                                           const std::vector<DyadicInterval>& family, int s, double c_same,
                                           NonStandardTest test) {
    if (!(c_same > 0)) throw DomainError("same-scale constant must be positive");
    if (s < 0) throw DomainError("s must be nonnegative");
    CollectionSplit out;
    out.s = s;
    out.c_same = c_same;
    out.test = test;
    std::vector<DyadicInterval> used;
    for (const auto& I : family) {
        if (I.k - s < split.k0) ++out.skipped;
        else used.push_back(I);
    }
    out.items = parallel_map(used.size(), [&](std::size_t i) {
        return classify(cfg, used[i], split.B_at(used[i].k - s), c_same, test);
    });
    return out;
}

double nonstandard_lower_constant(const CollectionSplit& cs) {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& it : cs.items)
        if (it.nonstandard) c = std::min(c, it.mass / (std::ldexp(1.0, -cs.s) * it.I.length()));
    return std::isfinite(c) ? c : 0;
}

CarlesonResult carleson_check(const CollectionSplit& cs, const std::vector<DyadicInterval>& family) {
    CarlesonResult out;
    for (const auto& J : family) {
        CarlesonRow row;
        row.J = J;
        for (const auto& it : cs.items)
            if (it.nonstandard && it.I.inside(J)) row.mass += it.I.length();
        row.ratio = row.mass / (std::ldexp(1.0, cs.s) * J.length());
        out.worst_ratio = std::max(out.worst_ratio, row.ratio);
        out.table.push_back(row);
    }
    return out;
}

ExceptionalSet exceptional_set(const CollectionSplit& cs, const Signal& like, const DyadicInterval& I0, double C) {
    if (!(C > 0)) throw DomainError("exceptional-set constant must be positive");
    ExceptionalSet F;
    F.overlap.assign(like.size(), 0);
    F.mask.assign(like.size(), 0);
    for (const auto& it : cs.items) {
        if (!it.nonstandard) continue;
        const CellRange c = cells(like, it.I);
        for (auto n = c.first; n < c.last; ++n) ++F.overlap[static_cast<std::size_t>(n)];
    }
    F.threshold = C * std::max(cs.s, 1) * std::ldexp(1.0, cs.s);
    std::size_t count = 0;
    for (std::size_t n = 0; n < like.size(); ++n)
        if (F.overlap[n] > F.threshold) {
            F.mask[n] = 1;
            ++count;
        }
    F.fraction = static_cast<double>(count) * like.step() / I0.length();
    return F;
}

double calibrate_exceptional_constant(const std::vector<const CollectionSplit*>& splits,
                                      const std::vector<const Signal*>& likes,
                                      const std::vector<DyadicInterval>& I0s) {
    for (int m = 0; m <= 40; ++m) {
        const double C = std::ldexp(1.0, m);
        bool ok = true;
        for (std::size_t i = 0; i < splits.size() && ok; ++i)
            ok = exceptional_set(*splits[i], *likes[i], I0s[i], C).fraction <= 0.25;
        if (ok) return C;
    }
    throw StructuralError("exceptional-set calibration did not converge");
}

Layers generational_layers(const CollectionSplit& cs, const ExceptionalSet& F, const Signal& like, double C) {
    Layers out;
    out.u0 = C * std::ldexp(1.0, cs.s);
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < cs.items.size(); ++i) {
        const auto& it = cs.items[i];
        if (!it.nonstandard) continue;
        const CellRange c = cells(like, it.I);
        bool inside = !c.empty();
        for (auto n = c.first; n < c.last && inside; ++n) inside = F.mask[static_cast<std::size_t>(n)] != 0;
        if (!inside) rest.push_back(i);
    }
    while (!rest.empty()) {
        std::vector<std::size_t> layer, next;
        for (auto i : rest) {
            bool minimal = true;
            for (auto k : rest)
                if (k != i && cs.items[k].I.inside(cs.items[i].I)) {
                    minimal = false;
                    break;
                }
            (minimal ? layer : next).push_back(i);
        }
        const double need = std::ldexp(1.0, static_cast<int>(out.K.size()) + 1);
        for (auto i : layer)
            if (cs.items[i].I.length() < need) ++out.length_violations;
        out.K.push_back(std::move(layer));
        rest = std::move(next);
    }
    return out;
}

BesselResult bessel_check(const CollectionSplit& cs, const Layers& layers, const Signal& like,
                          const DyadicInterval& I0, int k0, int trials, std::uint64_t seed) {
    BesselResult out;
    const int L = static_cast<int>(layers.K.size());
    out.layers = L;
    const double h = like.step();
    const double I0len = I0.length();
    std::vector<std::vector<cplx>> beta(static_cast<std::size_t>(L), std::vector<cplx>(like.size(), cplx(0)));
    for (int j = 0; j < L; ++j)
        for (auto i : layers.K[static_cast<std::size_t>(j)]) {
            add_patch(beta[static_cast<std::size_t>(j)], cs.items[i].TB);
            out.diag_direct += norm2_sq(cs.items[i].TB, h);
        }
    out.gram.assign(static_cast<std::size_t>(L), std::vector<double>(static_cast<std::size_t>(L), 0.0));
    std::vector<std::vector<double>> absg = out.gram;
    for (int j = 0; j < L; ++j)
        for (int k = 0; k <= j; ++k) {
            std::complex<long double> acc = 0;
            const auto& a = beta[static_cast<std::size_t>(j)];
            const auto& b = beta[static_cast<std::size_t>(k)];
            for (std::size_t n = 0; n < a.size(); ++n) acc += std::complex<long double>(a[n] * std::conj(b[n]));
            const cplx g(static_cast<double>(acc.real() * h), static_cast<double>(acc.imag() * h));
            out.gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = g.real();
            out.gram[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = g.real();
            absg[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = std::abs(g);
        }
    for (int j = 0; j < L; ++j) out.diag_sum += out.gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
    const double near_bound = std::ldexp(1.0, -cs.s) * I0len;
    out.diag_ratio = out.diag_sum / near_bound;
    for (int j = 0; j < L; ++j)
        for (int k = 0; k < j; ++k) {
            GramEntry e;
            e.j = j + 1;
            e.k = k + 1;
            e.value = absg[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            e.far = e.j > e.k + k0;
            e.bound = e.far ? std::ldexp(1.0, -e.j) * I0len : near_bound;
            e.ratio = e.value / e.bound;
            if (e.far) out.far_worst = std::max(out.far_worst, e.ratio);
            else out.near_ratio = std::max(out.near_ratio, e.ratio);
            out.entries.push_back(e);
        }
    auto quad = [&](const std::vector<int>& c) {
        long double acc = 0;
        for (int j = 0; j < L; ++j)
            for (int k = 0; k < L; ++k)
                acc += c[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(k)] *
                       out.gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        return static_cast<double>(acc);
    };
    double best = 0;
    std::vector<int> c(static_cast<std::size_t>(L), 0);
    if (L <= 12) {
        out.exhaustive = true;
        std::size_t total = 1;
        for (int j = 0; j < L; ++j) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t t = code;
            for (int j = 0; j < L; ++j, t /= 3) c[static_cast<std::size_t>(j)] = static_cast<int>(t % 3) - 1;
            best = std::max(best, quad(c));
        }
    } else {
        std::fill(c.begin(), c.end(), 1);
        best = std::max(best, quad(c));
        for (int j = 0; j < L; ++j) c[static_cast<std::size_t>(j)] = j % 2 ? -1 : 1;
        best = std::max(best, quad(c));
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(-1, 1);
        for (int t = 0; t < trials; ++t) {
            for (auto& v : c) v = pick(rng);
            best = std::max(best, quad(c));
        }
    }
    out.worst_norm = std::sqrt(std::max(0.0, best));
    out.ratio = out.worst_norm / (std::max(cs.s, 1) * std::pow(2.0, -cs.s / 2.0) * std::sqrt(I0len));
    if (L > 0 && out.worst_norm > 0) {
        std::vector<cplx> partial(like.size(), cplx(0));
        std::vector<double> mx(like.size(), 0.0);
        for (int j = 0; j < L; ++j)
            for (std::size_t n = 0; n < like.size(); ++n) {
                partial[n] += beta[static_cast<std::size_t>(j)][n];
                mx[n] = std::max(mx[n], std::abs(partial[n]));
            }
        long double acc = 0;
        for (double v : mx) acc += v * v;
        out.rm_ratio = std::sqrt(static_cast<double>(acc) * h) / (out.worst_norm * std::log(2.0 + L));
    }
    return out;
}

namespace {

Signal nonstandard_sup(const CollectionSplit& cs, const Signal& like, const ExceptionalSet* F) {
    std::map<int, std::vector<cplx>> by_scale;
    for (const auto& it : cs.items) {
        if (!it.nonstandard) continue;
        if (F) {
            const CellRange c = cells(like, it.I);
            bool inside = !c.empty();
            for (auto n = c.first; n < c.last && inside; ++n) inside = F->mask[static_cast<std::size_t>(n)] != 0;
            if (inside) continue;
        }
        auto& v = by_scale.try_emplace(it.I.k, like.size(), cplx(0)).first->second;
        add_patch(v, it.TB);
    }
    std::map<int, Signal> parts;
    for (auto& [k, v] : by_scale) parts.emplace(k, Signal(like.lo(), like.hi(), like.step(), std::move(v)));
    return maximal_truncation(parts, like);
}

}  // namespace

NonStandardMaximal nonstandard_maximal_check(const CollectionSplit& cs, const ExceptionalSet& F,
                                             const GoodBadSplit& split, const Signal& g) {
    NonStandardMaximal out;
    const double I0len = split.I0.length();
    const double bound = std::pow(2.0, -cs.s / 5.0) * std::sqrt(I0len);
    const Signal all = nonstandard_sup(cs, split.f, nullptr);
    const Signal sharp = nonstandard_sup(cs, split.f, &F);
    out.l2 = norm_p(all, 2);
    out.l2_ratio = out.l2 / bound;
    out.l2_sharp = norm_p(sharp, 2);
    out.l2_sharp_ratio = out.l2_sharp / bound;
    long double acc = 0;
    for (std::size_t n = 0; n < g.size(); ++n) acc += all[n].real() * std::abs(g[n]);
    out.pairing = static_cast<double>(acc) * g.step();
    const double gavg = AbsIntegral(g).mean(split.I0.interval());
    out.pairing_ratio = gavg > 0 ? out.pairing / (I0len * gavg) : 0;
    return out;
}

StandardResult standard_part_check(const std::vector<CollectionSplit>& splits, const GoodBadSplit& split,
                                   const std::vector<DyadicInterval>& family, const std::vector<double>& q_list) {
    StandardResult out;
    const Signal& like = split.f;
    const double I0len = split.I0.length();
    std::map<int, std::vector<cplx>> by_scale;
    for (const auto& cs : splits)
        for (const auto& it : cs.items) {
            if (it.nonstandard) continue;
            auto& v = by_scale.try_emplace(it.I.k, like.size(), cplx(0)).first->second;
            add_patch(v, it.TB);
        }
    const AbsIntegral F(like);
    double sup_avg = 0;
    for (const auto& I : family) sup_avg = std::max(sup_avg, F.mean(I.interval()));
    std::map<int, Signal> parts;
    std::vector<double> xs, ys;
    for (auto& [j, v] : by_scale) {
        Signal S(like.lo(), like.hi(), like.step(), std::move(v));
        StandardRow row;
        row.j = j;
        row.l2_sq = std::pow(norm_p(S, 2), 2);
        row.l2_ratio = row.l2_sq / (std::pow(2.0, -j / 2.0) * I0len);
        row.linf = S.sup_norm();
        row.linf_ratio = sup_avg > 0 ? row.linf / sup_avg : 0;
        if (row.l2_sq > 0) {
            xs.push_back(j);
            ys.push_back(std::log2(row.l2_sq));
        }
        out.rows.push_back(row);
        parts.emplace(j, std::move(S));
    }
    out.l2_slope = xs.size() >= 2 ? ls_slope(xs, ys) : 0;
    const Signal sup = maximal_truncation(parts, like);
    for (double q : q_list) out.q_ratios.emplace_back(q, norm_p(sup, q) / (q * std::pow(I0len, 1 / q)));
    return out;
}

GoodPartResult good_part_norm_check(const OperatorConfig& cfg, const GoodBadSplit& split,
                                    const std::vector<DyadicInterval>& family, const std::vector<double>& q_list,
                                    bool single_scale) {
    GoodPartResult out;
    const double I0len = split.I0.length();
    const Signal T = apply_T_star(cfg, family, split.gamma);
    std::vector<double> ratios;
    for (double q : q_list) {
        if (q < 2) throw DomainError("q must be at least 2");
        const double r = norm_p(T, q) / (q * std::pow(I0len, 1 / q));
        out.q_ratios.emplace_back(q, r);
        ratios.push_back(r);
    }
    out.q_span = positive_span(ratios);
    if (!single_scale) return out;
    std::map<int, std::vector<DyadicInterval>> by_scale;
    for (const auto& I : family) by_scale[I.k].push_back(I);
    std::vector<double> xs, ys;
    for (const auto& [K, coll] : by_scale) {
        const double nrm = collection_norm(cfg, coll, split.f, 30);
        out.single_scale.emplace_back(K, nrm);
        if (nrm > 0) {
            xs.push_back(K);
            ys.push_back(std::log2(nrm));
        }
    }
    out.single_scale_slope = xs.size() >= 2 ? ls_slope(xs, ys) : 0;
    return out;
}

TraceReport run_trace(const OperatorConfig& cfg, const Signal& f, const Signal& g, const DyadicInterval& I0,
                      const TraceOptions& opt) {
    TraceReport rep;
    const GoodBadSplit split = good_bad_split(f, I0, opt.K, cfg.fam.k0, cfg.grid.k_min);
    const auto family = trace_family(cfg, split, g);
    rep.bad = bad_part_report(split);
    rep.bad_intervals = split.bad.size();
    rep.family_size = family.size();
    std::vector<CollectionSplit> splits;
    for (int s : opt.s_values) splits.push_back(split_standard_nonstandard(cfg, split, family, s, opt.c_same, opt.test));
    double C = opt.exceptional_C;
    if (!(C > 0)) {
        std::vector<const CollectionSplit*> ps;
        std::vector<const Signal*> ls;
        std::vector<DyadicInterval> is;
        for (const auto& cs : splits) {
            ps.push_back(&cs);
            ls.push_back(&split.f);
            is.push_back(I0);
        }
        C = calibrate_exceptional_constant(ps, ls, is);
    }
    rep.exceptional_C = C;
    for (const auto& cs : splits) {
        TraceStep st;
        st.s = cs.s;
        st.nonstandard = cs.nonstandard_count();
        st.standard = cs.standard_count();
        st.skipped = cs.skipped;
        st.lower_constant = nonstandard_lower_constant(cs);
        st.carleson = carleson_check(cs, family).worst_ratio;
        const ExceptionalSet F = exceptional_set(cs, split.f, I0, C);
        st.exceptional_fraction = F.fraction;
        st.exceptional_threshold = F.threshold;
        const Layers layers = generational_layers(cs, F, split.f, C);
        st.layer_count = layers.K.size();
        st.u0 = layers.u0;
        st.length_violations = layers.length_violations;
        st.bessel = bessel_check(cs, layers, split.f, I0, cfg.fam.k0, opt.bessel_trials, opt.seed + cs.s);
        st.maximal = nonstandard_maximal_check(cs, F, split, g);
        rep.steps.push_back(std::move(st));
    }
    rep.standard = standard_part_check(splits, split, family, opt.q_list);
    if (opt.good_part) rep.good = good_part_norm_check(cfg, split, family, opt.q_list, opt.single_scale);
    return rep;
}

nlohmann::json to_json(const TraceReport& r) {
    using nlohmann::json;
    json bi = json::object();
    for (const auto& [k, v] : r.bad.bi_ratio) bi[std::to_string(k)] = v;
    json steps = json::array();
    for (const auto& s : r.steps) {
        json gram = json::array();
        for (const auto& e : s.bessel.entries)
            gram.push_back({{"j", e.j}, {"k", e.k}, {"value", e.value}, {"ratio", e.ratio}, {"far", e.far}});
        steps.push_back({{"s", s.s},
                         {"nonstandard", s.nonstandard},
                         {"standard", s.standard},
                         {"skipped", s.skipped},
                         {"lower_constant", s.lower_constant},
                         {"carleson_ratio", s.carleson},
                         {"exceptional_fraction", s.exceptional_fraction},
                         {"exceptional_threshold", s.exceptional_threshold},
                         {"layers", s.layer_count},
                         {"u0", s.u0},
                         {"length_violations", s.length_violations},
                         {"bessel",
                          {{"worst_norm", s.bessel.worst_norm},
                           {"ratio", s.bessel.ratio},
                           {"exhaustive", s.bessel.exhaustive},
                           {"diag_sum", s.bessel.diag_sum},
                           {"diag_direct", s.bessel.diag_direct},
                           {"diag_ratio", s.bessel.diag_ratio},
                           {"near_ratio", s.bessel.near_ratio},
                           {"far_worst", s.bessel.far_worst},
                           {"rm_ratio", s.bessel.rm_ratio},
                           {"gram", gram}}},
                         {"nonstandard_maximal",
                          {{"l2_ratio", s.maximal.l2_ratio},
                           {"l2_sharp_ratio", s.maximal.l2_sharp_ratio},
                           {"pairing_ratio", s.maximal.pairing_ratio}}}});
    }
    json std_rows = json::array();
    for (const auto& row : r.standard.rows)
        std_rows.push_back({{"j", row.j}, {"l2_ratio", row.l2_ratio}, {"linf_ratio", row.linf_ratio}});
    json std_q = json::array(), good_q = json::array(), single = json::array();
    for (const auto& [q, v] : r.standard.q_ratios) std_q.push_back({{"q", q}, {"ratio", v}});
    for (const auto& [q, v] : r.good.q_ratios) good_q.push_back({{"q", q}, {"ratio", v}});
    for (const auto& [k, v] : r.good.single_scale) single.push_back({{"k", k}, {"norm", v}});
    return {{"bad_part",
             {{"reconstruction_error", r.bad.reconstruction_error},
              {"gamma_ratio", r.bad.gamma_ratio},
              {"bsum", r.bad.bsum},
              {"bi_ratio", bi}}},
            {"bad_intervals", r.bad_intervals},
            {"family_size", r.family_size},
            {"exceptional_C", r.exceptional_C},
            {"steps", steps},
            {"standard", {{"rows", std_rows}, {"l2_slope", r.standard.l2_slope}, {"q_ratios", std_q}}},
            {"good",
             {{"q_ratios", good_q},
              {"q_span", r.good.q_span},
              {"single_scale", single},
              {"single_scale_slope", r.good.single_scale_slope}}}};
}

}  // namespace osclab
