#include "osclab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "osclab/errors.hpp"
#include "osclab/parallel.hpp"

namespace osclab {

void SparseCollection::add(const Interval& S, std::vector<CellRange> E) {
    intervals.push_back(S);
    witnesses.push_back(std::move(E));
}

double SparseCollection::witness_measure(std::size_t i) const {
    std::ptrdiff_t n = 0;
    for (const auto& c : witnesses[i]) n += c.size();
    return static_cast<double>(n) * step;
}

double sparse_form(const SparseCollection& S, const Signal& f, const Signal& g, double r, double s) {
    if (r < 1 || s < 1) throw DomainError("sparse form exponents must be >= 1");
    long double acc = 0;
    for (const auto& I : S.intervals) acc += I.length() * average_r(f, I, r) * average_r(g, I, s);
    return static_cast<double>(acc);
}

SparsityCheck verify_sparsity(const SparseCollection& S) {
    SparsityCheck out;
    std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> all;
    for (std::size_t i = 0; i < S.size(); ++i) {
        const auto own = cell_range(S.lo, S.step, std::numeric_limits<std::ptrdiff_t>::max() / 4, S.intervals[i]);
        for (const auto& c : S.witnesses[i]) {
            if (c.empty()) continue;
            if (c.first < own.first || c.last > own.last) throw StructuralError("witness escapes its interval");
            all.emplace_back(c.first, c.last);
        }
        out.eta = std::min(out.eta, S.witness_measure(i) / S.intervals[i].length());
    }
    std::sort(all.begin(), all.end());
    out.disjoint = true;
    for (std::size_t i = 1; i < all.size(); ++i)
        if (all[i].first < all[i - 1].second) out.disjoint = false;
    out.ok = out.disjoint && out.eta >= 0.25;
    return out;
}

namespace {

struct Stopper {
    AbsIntegral F, G;
    double tf, tg;
    Stopper(const Signal& f, const Signal& g, const DyadicInterval& I0) : F(f), G(g) {
        tf = stopping_threshold * F.mean(I0.interval());
        tg = stopping_threshold * G.mean(I0.interval());
    }
    bool operator()(const DyadicInterval& K) const {
        return F.mean(K.interval()) > tf || G.mean(K.interval()) > tg;
    }
};

}  // namespace

int finest_scale(const Signal& f, int k_min) {
    return std::max(k_min, static_cast<int>(std::ceil(std::log2(f.step()))));
}

std::vector<DyadicInterval> stopping_children(const Signal& f, const Signal& g, const DyadicInterval& I0, int k_min) {
    const Stopper stop(f, g, I0);
    return maximal_subintervals(I0, finest_scale(f, k_min), std::cref(stop));
}

std::vector<DyadicInterval> stopping_children_scan(const Signal& f, const Signal& g, const DyadicInterval& I0,
                                                   int k_min) {
    const Stopper stop(f, g, I0);
    const int kf = finest_scale(f, k_min);
    if (I0.k <= kf) return {};
    std::vector<DyadicInterval> hits;
    for (const auto& K : descendants(I0, kf))
        if (!(K == I0) && stop(K)) hits.push_back(K);
    std::vector<DyadicInterval> out;
    for (const auto& K : hits) {
        bool maximal = true;
        for (const auto& J : hits)
            if (!(J == K) && K.inside(J)) maximal = false;
        if (maximal) out.push_back(K);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lo() < b.lo(); });
    return out;
}

std::vector<DyadicInterval> sparse_family(const OperatorConfig& cfg, const DyadicInterval& I0) {
    std::vector<DyadicInterval> out;
    if (I0.k < cfg.fam.k0 + 2) return out;
    for (const auto& I : descendants(I0, cfg.fam.k0 + 2))
        if (I.k >= cfg.grid.k_min) out.push_back(I);
    return out;
}

namespace {

double pairing_value(const Signal& Tf, const Signal& g) {
    long double acc = 0;
    for (std::size_t n = 0; n < g.size(); ++n) acc += Tf[n].real() * g[n].real();
    return static_cast<double>(acc * g.step());
}

double above_constant(const OperatorConfig& cfg, const Signal& f, const DyadicInterval& I0) {
    const double avg = AbsIntegral(f).mean(I0.interval());
    if (avg == 0) return 0;
    std::vector<double> sum(f.size(), 0.0);
    for (DyadicInterval J = I0.parent(); J.k <= cfg.grid.k_max; J = J.parent()) {
        const Patch p = T_I_patch(cfg, J, f);
        for (std::size_t i = 0; i < p.values.size(); ++i)
            sum[static_cast<std::size_t>(p.first) + i] += std::abs(p.values[i]);
    }
    const CellRange c = cells(f, I0);
    double m = 0;
    for (auto n = c.first; n < c.last; ++n) m = std::max(m, sum[static_cast<std::size_t>(n)]);
    return m / avg;
}

}  // namespace

SparseWitness build_sparse_witness(const OperatorConfig& cfg, const Signal& f, const Signal& g,
                                   const DyadicInterval& I0, int max_depth, double r) {
    if (!(r > 1)) throw DomainError("r must exceed 1");
    SparseWitness out;
    auto& S = out.collection;
    auto& rep = out.report;
    S.lo = f.lo();
    S.step = f.step();
    const int family_floor = cfg.fam.k0 + 2;
    struct Node {
        DyadicInterval K;
        int depth;
    };
    std::vector<Node> todo{{I0, 0}};
    while (!todo.empty()) {
        const Node node = todo.back();
        todo.pop_back();
        rep.depth = std::max(rep.depth, node.depth);
        const auto kids = stopping_children(f, g, node.K, cfg.grid.k_min);
        const CellRange own = cells(f, node.K);
        std::vector<CellRange> E;
        std::ptrdiff_t at = own.first;
        double union_len = 0;
        std::set<std::pair<int, std::int64_t>> straddle;
        for (const auto& K : kids) {
            const CellRange c = cells(f, K);
            if (c.first > at) E.push_back({at, c.first});
            at = std::max(at, c.last);
            union_len += K.length();
            for (DyadicInterval A = K.parent(); A.k <= node.K.k; A = A.parent())
                if (A.k >= family_floor) straddle.insert({A.k, A.n});
        }
        if (own.last > at) E.push_back({at, own.last});
        S.add(node.K.interval(), std::move(E));
        rep.worst_union_fraction = std::max(rep.worst_union_fraction, union_len / node.K.length());
        rep.straddlers += static_cast<long>(straddle.size());
        if (kids.empty()) continue;
        if (node.depth >= max_depth) {
            rep.partial = true;
            continue;
        }
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) todo.push_back({*it, node.depth + 1});
    }
    const auto check = verify_sparsity(S);
    S.eta = check.eta;
    const Signal Tf = apply_T_star(cfg, sparse_family(cfg, I0), f);
    out.pairing = pairing_value(Tf, g);
    rep.r = 1;
    rep.s = r / (r - 1);
    rep.form = sparse_form(S, f, g, rep.r, rep.s);
    rep.pairing = out.pairing;
    rep.ratio = rep.form > 0 ? std::abs(rep.pairing) / rep.form : 0;
    rep.size = S.size();
    rep.eta = check.eta;
    rep.above_constant = above_constant(cfg, f, I0);
    return out;
}

nlohmann::json to_json(const SparseBoundReport& r) {
    return {{"r", r.r},
            {"s", r.s},
            {"form", r.form},
            {"pairing", r.pairing},
            {"ratio", r.ratio},
            {"depth", r.depth},
            {"size", r.size},
            {"partial", r.partial},
            {"eta", r.eta},
            {"worst_union_fraction", r.worst_union_fraction},
            {"straddlers", r.straddlers},
            {"above_constant", r.above_constant}};
}

nlohmann::json to_json(const SparseCollection& S) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < S.size(); ++i) {
        nlohmann::json w = nlohmann::json::array();
        for (const auto& c : S.witnesses[i])
            w.push_back({S.lo + static_cast<double>(c.first) * S.step, S.lo + static_cast<double>(c.last) * S.step});
        arr.push_back({{"lo", S.intervals[i].lo}, {"hi", S.intervals[i].hi}, {"witness", w}});
    }
    return {{"eta", S.eta}, {"intervals", arr}};
}

std::vector<SparseConstant> sparse_scaling_study(const OperatorConfig& cfg, const std::vector<SignalPair>& corpus,
                                                 const DyadicInterval& I0, const std::vector<double>& rs) {
    for (double r : rs)
        if (!(r > 1 && r <= 2)) throw DomainError("r must lie in (1, 2]");
    struct Built {
        bool skipped = true;
        SparseWitness w;
    };
    auto built = parallel_map(corpus.size(), [&](std::size_t i) {
        Built b;
        const auto& [f, g] = corpus[i];
        const CellRange c = cells(f, I0);
        double fm = 0, gm = 0;
        for (auto n = c.first; n < c.last; ++n) {
            fm = std::max(fm, std::abs(f[static_cast<std::size_t>(n)]));
            gm = std::max(gm, std::abs(g[static_cast<std::size_t>(n)]));
        }
        if (fm == 0 || gm == 0) return b;
        b.skipped = false;
        b.w = build_sparse_witness(cfg, f, g, I0);
        return b;
    });
    std::vector<SparseConstant> out;
    for (double r : rs) {
        SparseConstant sc;
        sc.r = r;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            SparseConstantRow row;
            row.pair = i;
            row.skipped = built[i].skipped;
            if (!row.skipped) {
                const auto& w = built[i].w;
                row.pairing = w.pairing;
                row.form = sparse_form(w.collection, corpus[i].first, corpus[i].second, 1, r / (r - 1));
                row.ratio = row.form > 0 ? std::abs(row.pairing) / row.form : 0;
                row.eta = w.report.eta;
                row.partial = w.report.partial;
                row.sparse = verify_sparsity(w.collection).ok;
                row.union_fraction = w.report.worst_union_fraction;
                sc.worst_ratio = std::max(sc.worst_ratio, row.ratio);
            }
            sc.table.push_back(row);
        }
        out.push_back(std::move(sc));
    }
    return out;
}

SparseConstant estimate_sparse_constant(const OperatorConfig& cfg, const std::vector<SignalPair>& corpus,
                                        const DyadicInterval& I0, double r) {
    return sparse_scaling_study(cfg, corpus, I0, {r}).front();
}

}  // namespace osclab
