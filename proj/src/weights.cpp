#include "osclab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osclab/errors.hpp"
#include "osclab/parallel.hpp"
#include "osclab/stats.hpp"

namespace osclab {

void check_weight(const Weight& w) {
    if (w.w.size() == 0) throw DomainError("empty weight");
    for (const auto& v : w.w.values())
        if (!(v.real() > 0) || v.imag() != 0 || !std::isfinite(v.real()))
            throw DomainError("weight values must be real, finite and positive");
}

Weight power_weight(const Signal& like, double x0, double a) {
    if (!(a > -1)) throw DomainError("power weight exponent must exceed -1");
    // Antiderivative of |t|^a, odd in t.
    auto F = [a](double t) { return std::copysign(std::pow(std::abs(t), a + 1) / (a + 1), t); };
    Weight out;
    out.w = Signal::zeros_like(like);
    const double h = like.step();
    for (std::size_t n = 0; n < like.size(); ++n) {
        const double c0 = like.lo() + static_cast<double>(n) * h - x0;
        out.w[n] = (F(c0 + h) - F(c0)) / h;
    }
    out.descriptor = "power";
    out.a = a;
    out.x0 = x0;
    check_weight(out);
    return out;
}

Weight constant_weight(const Signal& like, double c) {
    Weight out;
    out.w = Signal::zeros_like(like);
    for (auto& v : out.w.values()) v = c;
    out.descriptor = "constant";
    check_weight(out);
    return out;
}

double a1_characteristic(const Weight& w) {
    check_weight(w);
    const Signal M = hl_maximal(w.w);
    double out = 0;
    for (std::size_t n = 0; n < M.size(); ++n) out = std::max(out, M[n].real() / w.w[n].real());
    return out;
}

double a1_characteristic_scan(const Weight& w) {
    check_weight(w);
    const std::size_t N = w.w.size();
    double out = 0;
    for (std::size_t s = 0; s < N; ++s) {
        long double sum = 0;
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t e = s; e < N; ++e) {
            sum += w.w[e].real();
            lo = std::min(lo, w.w[e].real());
            out = std::max(out, static_cast<double>(sum / static_cast<long double>(e - s + 1)) / lo);
        }
    }
    return out;
}

double ap_characteristic(const Weight& w, double p) {
    if (!(p > 1)) throw DomainError("p must exceed 1");
    check_weight(w);
    const std::size_t N = w.w.size();
    const double pp = p / (p - 1);
    std::vector<double> a(N), b(N);
    for (std::size_t n = 0; n < N; ++n) {
        a[n] = w.w[n].real();
        b[n] = std::pow(a[n], 1 - pp);
    }
    const Prefix A(a), B(b);
    const auto rows = parallel_map(N, [&](std::size_t s) {
        double m = 0;
        for (std::size_t e = s + 1; e <= N; ++e) {
            const auto len = static_cast<double>(e - s);
            const auto si = static_cast<std::ptrdiff_t>(s), ei = static_cast<std::ptrdiff_t>(e);
            m = std::max(m, A.sum(si, ei) / len * std::pow(B.sum(si, ei) / len, p - 1));
        }
        return m;
    });
    return *std::max_element(rows.begin(), rows.end());
}

namespace {

std::vector<Signal> H_star_all(const OperatorConfig& cfg, const std::vector<Signal>& corpus) {
    return parallel_map(corpus.size(),
                        [&](std::size_t i) { return apply_H_star(cfg, corpus[i], default_eps_set(corpus[i])); });
}

double weighted_lp(const Signal& f, const Weight& w, double p) {
    long double acc = 0;
    for (std::size_t n = 0; n < f.size(); ++n) acc += std::pow(std::abs(f[n]), p) * w.w[n].real();
    return std::pow(static_cast<double>(acc) * f.step(), 1 / p);
}

}  // namespace

double weighted_weak_norm(const Weight& w, const std::vector<Signal>& corpus, const std::vector<Signal>& Hf) {
    check_weight(w);
    double out = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!corpus[i].same_grid(w.w)) throw DomainError("weight and signal grids differ");
        const double denom = weighted_lp(corpus[i], w, 1);
        if (denom == 0) continue;
        double vmin = std::numeric_limits<double>::infinity(), vmax = 0;
        for (const auto& v : Hf[i].values()) {
            const double a = std::abs(v);
            if (a > 0) vmin = std::min(vmin, a);
            vmax = std::max(vmax, a);
        }
        if (vmax == 0) continue;
        constexpr int grid = 40;
        for (int t = 0; t < grid; ++t) {
            // λ strictly below each endpoint so the level sets are nonempty at both ends.
            const double u = static_cast<double>(t) / (grid - 1);
            const double lambda = 0.999 * vmin * std::pow(vmax / vmin, u);
            long double mass = 0;
            for (std::size_t n = 0; n < Hf[i].size(); ++n)
                if (std::abs(Hf[i][n]) > lambda) mass += w.w[n].real();
            out = std::max(out, lambda * static_cast<double>(mass) * corpus[i].step() / denom);
        }
    }
    return out;
}

double weighted_strong_norm(const Weight& w, double p, const std::vector<Signal>& corpus,
                            const std::vector<Signal>& Hf) {
    check_weight(w);
    if (!(p >= 1)) throw DomainError("p must be >= 1");
    double out = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!corpus[i].same_grid(w.w)) throw DomainError("weight and signal grids differ");
        const double denom = weighted_lp(corpus[i], w, p);
        if (denom == 0) continue;
        out = std::max(out, weighted_lp(Hf[i], w, p) / denom);
    }
    return out;
}

double weighted_weak_norm(const OperatorConfig& cfg, const Weight& w, const std::vector<Signal>& corpus) {
    if (corpus.empty()) throw DomainError("corpus must be nonempty");
    return weighted_weak_norm(w, corpus, H_star_all(cfg, corpus));
}

double weighted_strong_norm(const OperatorConfig& cfg, const Weight& w, double p, const std::vector<Signal>& corpus) {
    if (corpus.empty()) throw DomainError("corpus must be nonempty");
    return weighted_strong_norm(w, p, corpus, H_star_all(cfg, corpus));
}

WeightStudy characteristic_scaling_study(const OperatorConfig& cfg, WeightedMode mode, double p, double x0,
                                         const std::vector<double>& exponents, const std::vector<Signal>& corpus) {
    if (corpus.empty()) throw DomainError("corpus must be nonempty");
    WeightStudy st;
    st.mode = mode;
    st.p = mode == WeightedMode::Weak ? 1 : p;
    if (mode == WeightedMode::Strong && !(p > 1)) throw DomainError("p must exceed 1");
    st.predicted = mode == WeightedMode::Weak ? 2 : std::max(2 / (p - 1), p / (p - 1));
    for (double a : exponents) {
        if (mode == WeightedMode::Weak && a > 0) throw DomainError("A1 power weights need a <= 0");
        if (mode == WeightedMode::Strong && !(a > -1 && a < p - 1)) throw DomainError("A_p power weights need -1 < a < p-1");
    }
    const auto Hf = H_star_all(cfg, corpus);
    std::vector<double> lx, ly;
    for (double a : exponents) {
        const Weight w = power_weight(corpus.front(), x0, a);
        WeightRow row;
        row.a = a;
        row.characteristic = mode == WeightedMode::Weak ? a1_characteristic(w) : ap_characteristic(w, p);
        row.norm = mode == WeightedMode::Weak ? weighted_weak_norm(w, corpus, Hf)
                                              : weighted_strong_norm(w, p, corpus, Hf);
        if (row.characteristic > 0 && row.norm > 0) {
            lx.push_back(std::log(row.characteristic));
            ly.push_back(std::log(row.norm));
        }
        st.rows.push_back(row);
    }
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0;
    for (const auto& r : st.rows) {
        cmin = std::min(cmin, r.characteristic);
        cmax = std::max(cmax, r.characteristic);
    }
    st.decades = cmax > 0 ? std::log10(cmax / cmin) : 0;
    st.span_warning = st.decades < 1.5;
    st.slope = lx.size() >= 2 ? ls_slope(lx, ly) : 0;
    st.ok = lx.size() >= 2 && st.slope <= st.predicted + 0.5;
    return st;
}

nlohmann::json to_json(const WeightStudy& s) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.rows) rows.push_back({{"a", r.a}, {"characteristic", r.characteristic}, {"norm", r.norm}});
    return {{"mode", s.mode == WeightedMode::Weak ? "weak" : "strong"},
            {"p", s.p},
            {"slope", s.slope},
            {"predicted", s.predicted},
            {"decades", s.decades},
            {"span_warning", s.span_warning},
            {"pass", s.ok},
            {"rows", rows}};
}

}  // namespace osclab
