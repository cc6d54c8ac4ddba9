#include "osclab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "osclab/errors.hpp"
#include "osclab/parallel.hpp"

namespace osclab {

OperatorConfig::OperatorConfig(KernelFamily fam_, GridFamily grid_, std::uint64_t budget_)
    : fam(fam_), grid(grid_), budget(budget_ ? budget_ : sample_budget()), cache_(std::make_shared<Cache>()) {
    fam.validate();
    grid.validate();
    if (grid.k_max < fam.k0 + 2) throw DomainError("grid scales must reach k0 + 2");
}

const CellKernel& OperatorConfig::psi_kernel(int k, double step, Side side) const {
    const auto key = std::make_tuple(k, step, static_cast<int>(side));
    {
        std::lock_guard<std::mutex> lk(cache_->mu);
        auto it = cache_->kernels.find(key);
        if (it != cache_->kernels.end()) return *it->second;
    }
    auto K = std::make_unique<CellKernel>(build_cell_kernel(fam.d, Band::rho(k), step, side, 0, fam.oversampling));
    std::lock_guard<std::mutex> lk(cache_->mu);
    auto [it, inserted] = cache_->kernels.emplace(key, std::move(K));
    return *it->second;
}

namespace {

int kernel_scale(const OperatorConfig& cfg, const DyadicInterval& I) {
    const int k = I.k - 2;
    if (k < cfg.fam.k0) throw DomainError("T_I needs |I| = 2^{k+2} with k >= k0");
    return k;
}

void add_patch(Signal& out, const Patch& p) {
    for (std::size_t i = 0; i < p.values.size(); ++i) out[static_cast<std::size_t>(p.first) + i] += p.values[i];
}

}  // namespace

Patch T_I_patch(const OperatorConfig& cfg, const DyadicInterval& I, const Signal& g, Side side) {
    const int k = kernel_scale(cfg, I);
    const CellKernel& K = cfg.psi_kernel(k, g.step(), side);
    const CellRange mc = middle_cells(g, I), oc = cells(g, I);
    Patch out;
    out.first = oc.first;
    out.values.assign(static_cast<std::size_t>(oc.size()), cplx(0));
    const auto N = static_cast<std::ptrdiff_t>(g.size());
    double in_sup = 0, leak = 0;
    for (auto m = mc.first; m < mc.last; ++m) {
        const cplx gm = g[static_cast<std::size_t>(m)];
        if (gm == cplx(0)) continue;
        in_sup = std::max(in_sup, std::abs(gm));
        for (std::size_t i = 0; i < K.w.size(); ++i) {
            const auto n = m + K.p_min + static_cast<std::ptrdiff_t>(i);
            if (n < 0 || n >= N) continue;
            if (n < oc.first || n >= oc.last) {
                leak = std::max(leak, std::abs(gm * K.w[i]));
                continue;
            }
            out.values[static_cast<std::size_t>(n - oc.first)] += gm * K.w[i];
        }
    }
    if (leak > 1e-12 * in_sup) throw StructuralError("T_I output leaks outside I; refine the step");
    return out;
}

Patch T_I_adjoint_patch(const OperatorConfig& cfg, const DyadicInterval& I, const Signal& h) {
    const int k = kernel_scale(cfg, I);
    const CellKernel& K = cfg.psi_kernel(k, h.step(), Side::Positive);
    const CellRange mc = middle_cells(h, I);
    const auto N = static_cast<std::ptrdiff_t>(h.size());
    Patch out;
    out.first = mc.first;
    out.values.assign(static_cast<std::size_t>(mc.size()), cplx(0));
    for (auto m = mc.first; m < mc.last; ++m) {
        cplx acc = 0;
        for (std::size_t i = 0; i < K.w.size(); ++i) {
            const auto n = m + K.p_min + static_cast<std::ptrdiff_t>(i);
            if (n < 0 || n >= N) continue;
            acc += std::conj(K.w[i]) * h[static_cast<std::size_t>(n)];
        }
        out.values[static_cast<std::size_t>(m - mc.first)] = acc;
    }
    return out;
}

Signal apply_T_I(const OperatorConfig& cfg, const DyadicInterval& I, const Signal& g) {
    Signal out = Signal::zeros_like(g);
    add_patch(out, T_I_patch(cfg, I, g));
    return out;
}

Signal apply_T_collection(const OperatorConfig& cfg, const std::vector<DyadicInterval>& coll, const Signal& f,
                          Side side) {
    auto patches = parallel_map(coll.size(), [&](std::size_t i) { return T_I_patch(cfg, coll[i], f, side); });
    Signal out = Signal::zeros_like(f);
    for (const auto& p : patches) add_patch(out, p);
    return out;
}

std::map<int, Signal> T_by_scale(const OperatorConfig& cfg, const std::vector<DyadicInterval>& coll, const Signal& f,
                                 Side side) {
    auto patches = parallel_map(coll.size(), [&](std::size_t i) { return T_I_patch(cfg, coll[i], f, side); });
    std::map<int, Signal> out;
    for (std::size_t i = 0; i < coll.size(); ++i) {
        auto it = out.find(coll[i].k);
        if (it == out.end()) it = out.emplace(coll[i].k, Signal::zeros_like(f)).first;
        add_patch(it->second, patches[i]);
    }
    return out;
}

Signal maximal_truncation(const std::map<int, Signal>& parts, const Signal& like) {
    Signal out = Signal::zeros_like(like);
    std::vector<cplx> cum(like.size(), cplx(0));
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        for (std::size_t n = 0; n < cum.size(); ++n) {
            cum[n] += it->second[n];
            out[n] = std::max(out[n].real(), std::abs(cum[n]));
        }
    }
    return out;
}

Signal apply_T_star(const OperatorConfig& cfg, const std::vector<DyadicInterval>& coll, const Signal& f, Side side) {
    return maximal_truncation(T_by_scale(cfg, coll, f, side), f);
}

std::vector<DyadicInterval> model_intervals(const OperatorConfig& cfg, int grid) {
    std::vector<DyadicInterval> out;
    for (int K = cfg.fam.k0 + 2; K <= cfg.grid.k_max; ++K) {
        if (K < cfg.grid.k_min) continue;
        auto v = grid_at_scale(cfg.grid, grid, K);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

// ------------------------------------------------------------------ H_ε

namespace {

void require_interior(const Signal& f) {
    if (f.size() < 3 || std::abs(f[0]) != 0 || std::abs(f[f.size() - 1]) != 0)
        throw RangeError("f must vanish on the boundary cells of the window");
}

void convolve_into(std::vector<cplx>& out, const Signal& f, const CellKernel& K) {
    const auto N = static_cast<std::ptrdiff_t>(f.size());
    for (std::ptrdiff_t m = 0; m < N; ++m) {
        const cplx fm = f[static_cast<std::size_t>(m)];
        if (fm == cplx(0)) continue;
        const auto lo = std::max<std::ptrdiff_t>(0, m + K.p_min);
        const auto hi = std::min<std::ptrdiff_t>(N - 1, m + K.p_max());
        for (auto n = lo; n <= hi; ++n) out[static_cast<std::size_t>(n)] += fm * K.w[static_cast<std::size_t>(n - m - K.p_min)];
    }
}

double window_width(const Signal& f) { return f.hi() - f.lo(); }

}  // namespace

Signal apply_H_trunc(const OperatorConfig& cfg, const Signal& f, double eps) {
    if (!(eps > 0)) throw DomainError("eps must be positive");
    require_interior(f);
    const CellKernel K = build_cell_kernel(cfg.fam.d, Band::inverse(), f.step(), Side::Both, eps, cfg.fam.oversampling,
                                           window_width(f) + f.step());
    std::vector<cplx> acc(f.size(), cplx(0));
    convolve_into(acc, f, K);
    return Signal(f.lo(), f.hi(), f.step(), std::move(acc));
}

Signal apply_H_star(const OperatorConfig& cfg, const Signal& f, const std::vector<double>& eps_set) {
    if (eps_set.empty()) throw DomainError("eps_set must be nonempty");
    for (double e : eps_set)
        if (!(e > 0)) throw DomainError("eps must be positive");
    require_interior(f);
    std::vector<double> eps = eps_set;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    const double cap = window_width(f) + f.step();
    std::vector<cplx> acc(f.size(), cplx(0));
    Signal out = Signal::zeros_like(f);
    double upper = cap;
    for (double e : eps) {
        if (e < upper) {
            const CellKernel K =
                build_cell_kernel(cfg.fam.d, Band::inverse(), f.step(), Side::Both, e, cfg.fam.oversampling, upper);
            convolve_into(acc, f, K);
            upper = e;
        }
        for (std::size_t n = 0; n < acc.size(); ++n) out[n] = std::max(out[n].real(), std::abs(acc[n]));
    }
    return out;
}

std::vector<double> default_eps_set(const Signal& f) {
    std::vector<double> out;
    const int lo = static_cast<int>(std::floor(std::log2(f.step())));
    const int hi = static_cast<int>(std::floor(std::log2(window_width(f))));
    for (int m = lo; m <= hi; ++m) out.push_back(std::ldexp(1.0, m));
    return out;
}

// ------------------------------------------------------------------ small scales

double rho_majorant_l1(const BumpRho& rho) {
    static const double v = [&] {
        const int n = 200000;
        const double top = BumpRho::chi_support;
        double run = 0;
        long double acc = 0;
        for (int i = n - 1; i >= 0; --i) {
            const double t = top * (i + 0.5) / n;
            run = std::max(run, std::fabs(rho(t)));
            acc += run;
        }
        return static_cast<double>(2 * acc * top / n);
    }();
    return v;
}

SmallScaleSplit small_scale_split(const OperatorConfig& cfg, const Signal& f) {
    const int finest = static_cast<int>(std::floor(std::log2(f.step()))) - 6;
    const Band cz{std::ldexp(1.0, finest - 1), 0.5};
    const CellKernel K = build_cell_kernel(cfg.fam.d, cz, f.step(), Side::Both, 0, cfg.fam.oversampling);
    std::vector<cplx> acc(f.size(), cplx(0));
    convolve_into(acc, f, K);
    SmallScaleSplit out;
    out.cz_part = Signal(f.lo(), f.hi(), f.step(), std::move(acc));
    out.hl_constant = (cfg.fam.k0 + 1) * rho_majorant_l1(cfg.fam.rho);
    out.hl_part_bound = hl_maximal(f);
    out.hl_part_bound *= out.hl_constant;
    return out;
}

Signal middle_part(const OperatorConfig& cfg, const Signal& f) {
    const CellKernel K =
        build_cell_kernel(cfg.fam.d, Band::rho_range(0, cfg.fam.k0), f.step(), Side::Both, 0, cfg.fam.oversampling);
    std::vector<cplx> acc(f.size(), cplx(0));
    convolve_into(acc, f, K);
    return Signal(f.lo(), f.hi(), f.step(), std::move(acc));
}

Domination domination_check(const OperatorConfig& cfg, const Signal& f, const std::vector<double>& eps_set) {
    const Signal H = apply_H_star(cfg, f, eps_set);
    Signal model = Signal::zeros_like(f);
    for (int grid = 1; grid <= 3; ++grid) {
        const auto coll = model_intervals(cfg, grid);
        model += apply_T_star(cfg, coll, f, Side::Positive);
        model += apply_T_star(cfg, coll, f, Side::Negative);
    }
    const SmallScaleSplit ss = small_scale_split(cfg, f);
    model += ss.cz_part.abs();
    model += ss.hl_part_bound;
    const Signal M = hl_maximal(f);
    Domination out;
    for (std::size_t n = 0; n < f.size(); ++n) {
        if (M[n].real() <= 0) continue;
        out.excess = std::max(out.excess, (H[n].real() - model[n].real()) / M[n].real());
        const double r = H[n].real() / model[n].real();
        if (r > out.ratio) {
            out.ratio = r;
            out.worst_x = f.x(static_cast<std::ptrdiff_t>(n));
        }
    }
    return out;
}

double single_scale_norm(const OperatorConfig& cfg, const Signal& like, int grid, int K, int iterations) {
    return collection_norm(cfg, grid_at_scale(cfg.grid, grid, K), like, iterations);
}

double collection_norm(const OperatorConfig& cfg, const std::vector<DyadicInterval>& coll, const Signal& like,
                       int iterations) {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    Signal v = Signal::zeros_like(like);
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = cplx(nd(rng), nd(rng));
    double lambda = 0;
    for (int it = 0; it < iterations; ++it) {
        const double nv = norm_p(v, 2);
        if (nv == 0) return 0;
        v *= 1.0 / nv;
        auto patches = parallel_map(coll.size(), [&](std::size_t i) {
            Signal t = Signal::zeros_like(like);
            add_patch(t, T_I_patch(cfg, coll[i], v));
            return T_I_adjoint_patch(cfg, coll[i], t);
        });
        Signal w = Signal::zeros_like(like);
        for (const auto& p : patches) add_patch(w, p);
        lambda = norm_p(w, 2);
        v = w;
    }
    return std::sqrt(lambda);
}

}  // namespace osclab
