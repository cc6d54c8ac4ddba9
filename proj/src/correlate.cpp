#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>

#include "osclab/errors.hpp"
#include "osclab/kernels.hpp"
#include "osclab/parallel.hpp"
#include "osclab/stats.hpp"

namespace osclab {

namespace {

// FFTW planning is not thread safe.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

constexpr std::uint64_t kFftLimit = std::uint64_t{1} << 22;
constexpr std::uint64_t kPointBudget = std::uint64_t{1} << 24;

OscIntegrand corr_integrand(const KernelFamily& fam, int j, int k, double x) {
    OscIntegrand g;
    g.d = fam.d;
    g.phase = {{x, 1}, {0.0, -1}};
    g.amp = {{x, Band::rho(k)}, {0.0, Band::rho(j)}};
    return g;
}

// Snap to a dyadic with 20 fractional bits so phases stay exact.
double dyadic(double x) { return std::ldexp(std::nearbyint(std::ldexp(x, 20)), -20); }

}  // namespace

Signal correlate(const KernelFamily& fam, int j, int k) {
    fam.validate();
    if (j < fam.k0 || j > k) throw DomainError("correlate requires k0 <= j <= k");
    const double h = std::min(psi_sample_step(fam, j), psi_sample_step(fam, k));
    const auto Na = static_cast<std::uint64_t>(std::ldexp(1.0, j + 1) / h);
    const auto Nb = static_cast<std::uint64_t>(std::ldexp(1.0, k + 1) / h);
    const std::uint64_t L = std::bit_ceil(Na + Nb);
    const std::uint64_t budget = std::min(sample_budget(), kFftLimit * 4);
    if (L > budget) throw ResourceError("correlate FFT length", L, budget);

    auto* a = fftw_alloc_complex(L);
    auto* b = fftw_alloc_complex(L);
    fftw_plan pa, pb, pc;
    {
        std::lock_guard<std::mutex> lk(fftw_mutex());
        pa = fftw_plan_dft_1d(static_cast<int>(L), a, a, FFTW_FORWARD, FFTW_ESTIMATE);
        pb = fftw_plan_dft_1d(static_cast<int>(L), b, b, FFTW_FORWARD, FFTW_ESTIMATE);
        pc = fftw_plan_dft_1d(static_cast<int>(L), b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (std::uint64_t n = 0; n < L; ++n) {
        cplx va = n < Na ? psi_eval(fam, j, (static_cast<double>(n) + 0.5) * h) : cplx(0);
        cplx vb = n < Nb ? psi_eval(fam, k, (static_cast<double>(n) + 0.5) * h) : cplx(0);
        a[n][0] = va.real();
        a[n][1] = va.imag();
        b[n][0] = vb.real();
        b[n][1] = vb.imag();
    }
    fftw_execute(pa);
    fftw_execute(pb);
    for (std::uint64_t n = 0; n < L; ++n) {
        cplx A(a[n][0], a[n][1]), B(b[n][0], b[n][1]);
        cplx C = std::conj(A) * B;
        b[n][0] = C.real();
        b[n][1] = C.imag();
    }
    fftw_execute(pc);
    const auto M = static_cast<std::int64_t>(std::ldexp(1.0, k + 1) / h);
    Signal out(-static_cast<double>(M) * h - h / 2, static_cast<double>(M) * h + h / 2, h);
    const double scale = h / static_cast<double>(L);
    for (std::int64_t p = -M; p <= M; ++p) {
        const std::uint64_t idx = p >= 0 ? static_cast<std::uint64_t>(p) : L - static_cast<std::uint64_t>(-p);
        out[static_cast<std::size_t>(p + M)] = cplx(b[idx][0], b[idx][1]) * scale;
    }
    {
        std::lock_guard<std::mutex> lk(fftw_mutex());
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pc);
    }
    fftw_free(a);
    fftw_free(b);
    return out;
}

double correlate_noise_floor(const KernelFamily& fam, int j, int k) {
    const double eps = std::numeric_limits<double>::epsilon();
    return 64 * eps * std::ldexp(1.0, -std::max(j, k)) * fam.rho.sup_norm() * fam.rho.l1_norm();
}

cplx correlate_at(const KernelFamily& fam, int j, int k, double x, std::uint64_t max_nodes, QuadStats* stats) {
    OscIntegrand g = corr_integrand(fam, j, k, x);
    const double a = std::max(std::ldexp(1.0, j - 1), std::ldexp(1.0, k - 1) - x);
    const double b = std::min(BumpRho::chi_support * std::ldexp(1.0, j), BumpRho::chi_support * std::ldexp(1.0, k) - x);
    return osc_integral(g, a, b, fam.oversampling, correlate_noise_floor(fam, j, k) * 1e-3, max_nodes, stats);
}

namespace {

struct PointEval {
    double x = 0, v = 0;
    bool skipped = false;
};

std::vector<PointEval> eval_points(const KernelFamily& fam, int j, int k, const std::vector<double>& xs) {
    return parallel_map(xs.size(), [&](std::size_t i) {
        PointEval p;
        p.x = xs[i];
        try {
            p.v = std::abs(correlate_at(fam, j, k, xs[i], kPointBudget));
        } catch (const ResourceError&) {
            p.skipped = true;
        }
        return p;
    });
}

SameScaleRow same_scale_fft(const KernelFamily& fam, int k) {
    Signal c = correlate(fam, k, k);
    SameScaleRow row;
    row.k = k;
    row.method = "fft";
    for (std::size_t n = 0; n < c.size(); ++n) {
        const double x = c.x(static_cast<std::ptrdiff_t>(n));
        const double v = std::abs(c[n]);
        if (std::fabs(x) <= 0.5) {
            row.sup_center = std::max(row.sup_center, v);
        } else if (v > row.sup_tail) {
            row.sup_tail = v;
            row.x_tail = std::fabs(x);
        }
    }
    row.points = static_cast<int>(c.size());
    const double L = std::bit_ceil(static_cast<std::uint64_t>(c.size()));
    row.noise_floor = std::numeric_limits<double>::epsilon() * std::log2(L) * row.sup_center * 4;
    return row;
}

SameScaleRow same_scale_direct(const KernelFamily& fam, int k) {
    SameScaleRow row;
    row.k = k;
    row.method = "direct";
    // |ψ̃∗ψ(x)| <= ψ̃∗ψ(0) by Cauchy-Schwarz, so the center sup is at x = 0.
    row.sup_center = std::abs(correlate_at(fam, k, k, 0.0, 0));
    std::vector<double> xs;
    for (int i = 1; i <= 96; ++i) xs.push_back(dyadic(0.5 + i / 128.0));
    const double top = 0.75 * std::ldexp(1.0, k);
    for (double x = 1.25; x <= top; x *= std::pow(2.0, 0.25)) xs.push_back(dyadic(x));
    auto res = eval_points(fam, k, k, xs);
    for (const auto& p : res) {
        if (p.skipped) {
            ++row.skipped;
            continue;
        }
        ++row.points;
        if (p.v > row.sup_tail) {
            row.sup_tail = p.v;
            row.x_tail = p.x;
        }
    }
    row.noise_floor = correlate_noise_floor(fam, k, k);
    return row;
}

}  // namespace

SameScaleResult verify_same_scale(const KernelFamily& fam, int k_lo, int k_hi) {
    fam.validate();
    SameScaleResult out;
    for (int k = k_lo; k <= k_hi; ++k) {
        if (k < fam.k0) continue;
        const double h = psi_sample_step(fam, k);
        const auto L = std::bit_ceil(static_cast<std::uint64_t>(std::ldexp(1.0, k + 2) / h));
        SameScaleRow row = L <= std::min(kFftLimit, sample_budget()) ? same_scale_fft(fam, k)
                                                                     : same_scale_direct(fam, k);
        row.ratio_center = row.sup_center * std::ldexp(1.0, k);
        row.ratio_tail = row.sup_tail * std::ldexp(1.0, 2 * k);
        row.at_noise_floor = row.sup_tail <= 10 * row.noise_floor;
        out.rows.push_back(row);
    }
    std::vector<double> ks, logs, tails, centers;
    for (const auto& r : out.rows) {
        out.c_same = std::max({out.c_same, r.ratio_center, r.ratio_tail});
        tails.push_back(r.ratio_tail);
        centers.push_back(r.ratio_center);
        if (r.sup_tail > 0) {
            ks.push_back(r.k);
            logs.push_back(std::log2(r.sup_tail));
        }
    }
    out.slope_tail = ks.size() >= 2 ? ls_slope(ks, logs) : std::numeric_limits<double>::quiet_NaN();
    out.span_tail = positive_span(tails);
    out.span_center = positive_span(centers);
    const bool tails_positive = std::all_of(tails.begin(), tails.end(), [](double v) { return v > 0; });
    out.pass = !out.rows.empty() && tails_positive && out.span_tail < 50 && out.span_center < 50;
    return out;
}

CrossScaleResult verify_cross_scale(const KernelFamily& fam, const std::vector<std::pair<int, int>>& pairs,
                                    double c_same) {
    fam.validate();
    CrossScaleResult out;
    out.bound = 100 * c_same;
    for (const auto& [j, k] : pairs)
        if (!(j < k - fam.k0)) throw DomainError("cross-scale pair needs j < k - k0");
    for (const auto& [j, k] : pairs) {
        CrossScaleRow row;
        row.j = j;
        row.k = k;
        const double lo = std::ldexp(1.0, k - 1) - BumpRho::chi_support * std::ldexp(1.0, j);
        const double hi = BumpRho::chi_support * std::ldexp(1.0, k) - std::ldexp(1.0, j - 1);
        std::vector<double> xs;
        const int n = 256;
        for (int i = 0; i <= n; ++i) xs.push_back(dyadic(lo + (hi - lo) * i / n));
        auto res = eval_points(fam, j, k, xs);
        for (const auto& p : res) {
            if (p.skipped) {
                ++row.skipped;
                continue;
            }
            ++row.points;
            if (p.v > row.sup_abs) {
                row.sup_abs = p.v;
                row.x_at = p.x;
            }
        }
        row.ratio = row.sup_abs * std::ldexp(1.0, 2 * k);
        row.noise_floor = correlate_noise_floor(fam, j, k);
        out.worst_ratio = std::max(out.worst_ratio, row.ratio);
        out.rows.push_back(row);
    }
    out.pass = !out.rows.empty() && out.worst_ratio <= out.bound;
    return out;
}

K0Calibration calibrate_k0(const KernelFamily& fam, int k_max, double c_same) {
    KernelFamily f0 = fam;
    f0.k0 = 0;
    std::vector<std::pair<int, int>> pairs;
    for (int k = 2; k <= k_max; ++k)
        for (int j = 1; j < k - 0; ++j) pairs.emplace_back(j, k);
    // j < k - 0 holds for every pair, so k0 = 0 admits them all.
    CrossScaleResult table = verify_cross_scale(f0, pairs, c_same);
    K0Calibration out;
    out.table = table.rows;
    for (int c = 0; c <= 8; ++c) {
        bool ok = true;
        for (const auto& r : table.rows)
            if (r.j >= c && r.j < r.k - c && r.ratio >= 100 * c_same) ok = false;
        if (ok) {
            out.k0 = c;
            out.calibrated = true;
            return out;
        }
    }
    out.k0 = 3;
    return out;
}

void write_same_scale_csv(const SameScaleResult& r, const std::string& path) {
    std::ofstream out(path);
    out << std::setprecision(12);
    out << "k,sup_center,sup_tail,ratio_center,ratio_tail,x_tail,noise_floor,at_noise_floor,method,points,skipped\n";
    for (const auto& w : r.rows)
        out << w.k << ',' << w.sup_center << ',' << w.sup_tail << ',' << w.ratio_center << ',' << w.ratio_tail << ','
            << w.x_tail << ',' << w.noise_floor << ',' << (w.at_noise_floor ? 1 : 0) << ',' << w.method << ','
            << w.points << ',' << w.skipped << '\n';
}

void write_cross_scale_csv(const CrossScaleResult& r, const std::string& path) {
    std::ofstream out(path);
    out << std::setprecision(12);
    out << "j,k,sup_abs,ratio,x_at,noise_floor,points,skipped\n";
    for (const auto& w : r.rows)
        out << w.j << ',' << w.k << ',' << w.sup_abs << ',' << w.ratio << ',' << w.x_at << ',' << w.noise_floor << ','
            << w.points << ',' << w.skipped << '\n';
}

}  // namespace osclab
