#include "osclab/maximal_rm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "osclab/errors.hpp"
#include "osclab/parallel.hpp"
#include "osclab/stats.hpp"

namespace osclab {

void check_family(const FunctionFamily& fam) {
    if (fam.phis.empty()) throw DomainError("family must be nonempty");
    for (const auto& p : fam.phis)
        if (!p.same_grid(fam.phis.front())) throw DomainError("family members must share a grid");
}

std::vector<std::vector<double>> gram_matrix(const FunctionFamily& fam) {
    check_family(fam);
    const std::size_t N = fam.size();
    std::vector<std::vector<double>> G(N, std::vector<double>(N));
    auto rows = parallel_map(N, [&](std::size_t i) {
        std::vector<double> r(N);
        for (std::size_t j = i; j < N; ++j) r[j] = inner(fam.phis[i], fam.phis[j]).real();
        return r;
    });
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i; j < N; ++j) G[i][j] = G[j][i] = rows[i][j];
    return G;
}

namespace {

double quad(const std::vector<std::vector<double>>& G, const std::vector<int>& c) {
    long double q = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c[i]) continue;
        for (std::size_t j = 0; j < c.size(); ++j)
            if (c[j]) q += static_cast<long double>(c[i] * c[j]) * G[i][j];
    }
    return static_cast<double>(q);
}

// Depth-first over {−1,0,1}^N keeping v = G c so each step costs O(N).
struct Exhaustive {
    const std::vector<std::vector<double>>& G;
    std::vector<int> c, best_c;
    std::vector<double> v;
    double best = -1;

    void run(std::size_t i, double q) {
        const std::size_t N = c.size();
        if (i == N) {
            if (q > best) {
                best = q;
                best_c = c;
            }
            return;
        }
        run(i + 1, q);
        for (int d : {1, -1}) {
            // c_i: 0 → d, Q(c + d e_i) = Q + 2d v_i + G_ii
            const double nq = q + 2.0 * d * v[i] + G[i][i];
            c[i] = d;
            for (std::size_t j = 0; j < N; ++j) v[j] += d * G[j][i];
            run(i + 1, nq);
            for (std::size_t j = 0; j < N; ++j) v[j] -= d * G[j][i];
            c[i] = 0;
        }
    }
};

}  // namespace

BesselConstant bessel_constant_gram(const std::vector<std::vector<double>>& G, int trials, std::uint64_t seed) {
    if (trials < 1) throw DomainError("trials must be >= 1");
    const std::size_t N = G.size();
    BesselConstant out;
    if (N == 0) return out;
    if (N <= 12) {
        Exhaustive ex{G, std::vector<int>(N, 0), {}, std::vector<double>(N, 0.0)};
        ex.run(0, 0.0);
        out.value = std::sqrt(std::max(0.0, ex.best));
        out.pattern = ex.best_c;
        out.exhaustive = true;
        return out;
    }
    std::vector<std::vector<int>> pats;
    pats.emplace_back(N, 1);
    std::vector<int> alt(N);
    for (std::size_t i = 0; i < N; ++i) alt[i] = i % 2 ? -1 : 1;
    pats.push_back(alt);
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<int> e(N, 0);
        e[i] = 1;
        pats.push_back(std::move(e));
    }
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        std::vector<int> c(N);
        for (auto& x : c) x = static_cast<int>(rng() % 3) - 1;
        pats.push_back(std::move(c));
    }
    const auto vals = parallel_map(pats.size(), [&](std::size_t i) { return quad(G, pats[i]); });
    std::size_t arg = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] > vals[arg]) arg = i;
    out.value = std::sqrt(std::max(0.0, vals[arg]));
    out.pattern = pats[arg];
    return out;
}

BesselConstant bessel_constant(const FunctionFamily& fam, int trials, std::uint64_t seed) {
    return bessel_constant_gram(gram_matrix(fam), trials, seed);
}

Signal rm_maximal(const FunctionFamily& fam) {
    check_family(fam);
    Signal S = Signal::zeros_like(fam.phis.front());
    std::vector<double> m(S.size(), 0.0);
    for (const auto& p : fam.phis) {
        S += p;
        for (std::size_t n = 0; n < m.size(); ++n) m[n] = std::max(m[n], std::abs(S[n]));
    }
    Signal out = Signal::zeros_like(S);
    for (std::size_t n = 0; n < m.size(); ++n) out[n] = m[n];
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> dyadic_blocks(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t at = 0;
    for (int b = 63; b >= 0; --b) {
        const std::size_t len = std::size_t{1} << b;
        if (n & len) {
            out.emplace_back(at, at + len);
            at += len;
        }
    }
    return out;
}

Signal chaining_maximal(const FunctionFamily& fam) {
    check_family(fam);
    const std::size_t N = fam.size();
    const std::size_t M = fam.phis.front().size();
    std::vector<double> total(M, 0.0);
    for (std::size_t len = 1; len <= N; len *= 2) {
        std::vector<double> lvl(M, 0.0);
        for (std::size_t a = 0; a + len <= N; a += len) {
            std::vector<cplx> s(M, 0.0);
            for (std::size_t j = a; j < a + len; ++j)
                for (std::size_t n = 0; n < M; ++n) s[n] += fam.phis[j][n];
            for (std::size_t n = 0; n < M; ++n) lvl[n] = std::max(lvl[n], std::abs(s[n]));
        }
        for (std::size_t n = 0; n < M; ++n) total[n] += lvl[n];
    }
    Signal out = Signal::zeros_like(fam.phis.front());
    for (std::size_t n = 0; n < M; ++n) out[n] = total[n];
    return out;
}

RmGenerator parse_rm_generator(const std::string& name) {
    if (name == "random_sign") return RmGenerator::RandomSign;
    if (name == "lacunary") return RmGenerator::Lacunary;
    if (name == "constant") return RmGenerator::Constant;
    throw ConfigError("", "unknown family generator '" + name + "'");
}

std::string to_string(RmGenerator g) {
    switch (g) {
        case RmGenerator::RandomSign: return "random_sign";
        case RmGenerator::Lacunary: return "lacunary";
        case RmGenerator::Constant: return "constant";
    }
    return "?";
}

FunctionFamily make_family(RmGenerator g, std::size_t N, std::size_t cells, std::uint64_t seed) {
    if (N == 0) throw DomainError("N must be >= 1");
    if (cells == 0 || (cells & (cells - 1))) throw DomainError("cells must be a power of two");
    const double h = 1.0 / static_cast<double>(cells);
    FunctionFamily fam;
    switch (g) {
        case RmGenerator::RandomSign: {
            if (N >= cells) throw DomainError("need N < cells for distinct Walsh functions");
            std::mt19937_64 rng(seed);
            std::vector<std::size_t> idx(cells - 1);
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i + 1;
            std::shuffle(idx.begin(), idx.end(), rng);
            for (std::size_t j = 0; j < N; ++j) {
                const double sign = rng() & 1 ? 1.0 : -1.0;
                Signal s(0, 1, h);
                for (std::size_t n = 0; n < cells; ++n)
                    s[n] = sign * (std::popcount(idx[j] & n) % 2 ? -1.0 : 1.0);
                fam.phis.push_back(std::move(s));
            }
            break;
        }
        case RmGenerator::Lacunary: {
            const double top = static_cast<double>(cells / 2 - 1);
            if (static_cast<double>(N) > top) throw DomainError("need N < cells/2 for distinct frequencies");
            const double q = N > 1 ? std::pow(top, 1.0 / static_cast<double>(N - 1)) : 2.0;
            std::vector<std::size_t> freq(N);
            for (std::size_t j = 0; j < N; ++j) {
                const auto geo = static_cast<std::size_t>(std::llround(std::pow(q, static_cast<double>(j))));
                freq[j] = j ? std::max(freq[j - 1] + 1, geo) : 1;
            }
            // The +1 floor can push the tail past the top frequency; pull it back.
            for (std::size_t j = N; j-- > 0;) {
                const auto cap = static_cast<std::size_t>(top) - (N - 1 - j);
                freq[j] = std::min(freq[j], cap);
            }
            for (std::size_t j = 0; j < N; ++j) {
                const double w = 2 * std::numbers::pi * static_cast<double>(freq[j]);
                fam.phis.push_back(Signal::sample(0, 1, h, [&](double x) { return cplx(std::sqrt(2.0) * std::cos(w * x)); }));
            }
            break;
        }
        case RmGenerator::Constant:
            for (std::size_t j = 0; j < N; ++j)
                fam.phis.push_back(Signal::sample(0, 1, h, [&](double) { return cplx(1.0 / static_cast<double>(N)); }));
            break;
    }
    return fam;
}

RmStudy rm_ratio_study(RmGenerator g, const std::vector<std::size_t>& N_list, std::size_t cells, int trials,
                       std::uint64_t seed) {
    RmStudy st;
    st.generator = g;
    std::vector<double> ratios;
    for (std::size_t N : N_list) {
        FunctionFamily fam = make_family(g, N, cells, seed + N);
        const auto A = bessel_constant(fam, trials, seed);
        fam.A = A.value;
        RmRow row;
        row.N = N;
        row.A = A.value;
        row.exhaustive = A.exhaustive;
        row.max_norm = norm_p(rm_maximal(fam), 2);
        row.chaining_norm = norm_p(chaining_maximal(fam), 2);
        row.ratio = row.A > 0 ? row.max_norm / (row.A * std::log(2.0 + static_cast<double>(N))) : 0;
        ratios.push_back(row.ratio);
        st.rows.push_back(row);
    }
    st.span = positive_span(ratios);
    return st;
}

nlohmann::json to_json(const RmStudy& s) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"N", r.N},
                        {"A", r.A},
                        {"exhaustive", r.exhaustive},
                        {"max_norm", r.max_norm},
                        {"chaining_norm", r.chaining_norm},
                        {"ratio", r.ratio}});
    return {{"generator", to_string(s.generator)}, {"span", s.span}, {"rows", rows}};
}

}  // namespace osclab
