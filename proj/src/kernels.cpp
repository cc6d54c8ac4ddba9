#include "osclab/kernels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>

#include "osclab/errors.hpp"
#include "osclab/jet.hpp"

namespace osclab {

namespace {

constexpr int kJetOrder = 13;  // series uses terms 0..kJetOrder-1
using J = Jet<kJetOrder>;
constexpr long double kTwoPi = 6.283185307179586476925286766559L;

// Smooth step: 0 for s <= 0, 1 for s >= 1, exp(−1/s) mollifier in between.
double smooth_step(double s) {
    if (s <= 0) return 0;
    if (s >= 1) return 1;
    const double z = 1 / s - 1 / (1 - s);
    if (z > 700) return 0;
    if (z < -700) return 1;
    return 1 / (1 + std::exp(z));
}

J smooth_step(const J& s) {
    const double s0 = s.c[0].real();
    if (s0 <= 0) return J(0.0);
    if (s0 >= 1) return J(1.0);
    const double z0 = 1 / s0 - 1 / (1 - s0);
    if (z0 > 700) return J(0.0);
    if (z0 < -700) return J(1.0);
    J z = recip(s) - recip(1.0 - s);
    return recip(1.0 + exp(z));
}

// χ(t) for t >= 0.
template <class T>
T chi_pos(const T& t) {
    return smooth_step(5.0 - 4.0 * t);
}

template <class T>
T band_eval(const Band& b, const T& y) {
    T hi = b.H > 0 ? chi_pos(y * (1.0 / b.H)) : T(1.0);
    T lo = b.L > 0 ? chi_pos(y * (1.0 / b.L)) : T(0.0);
    if constexpr (std::is_same_v<T, double>)
        return (hi - lo) / y;
    else
        return (hi - lo) * recip(y);
}

struct GaussLegendre {
    std::array<double, 16> x{}, w{};
    GaussLegendre() {
        const int n = 16;
        for (int i = 0; i < n; ++i) {
            long double z = std::cos(3.14159265358979323846L * (i + 0.75L) / (n + 0.5L)), dp = 0;
            for (int it = 0; it < 100; ++it) {
                long double p0 = 1, p1 = z;
                for (int m = 2; m <= n; ++m) {
                    long double p2 = ((2 * m - 1) * z * p1 - (m - 1) * p0) / m;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1);
                long double dz = p1 / dp;
                z -= dz;
                if (std::fabs(static_cast<double>(dz)) < 1e-19) break;
            }
            x[static_cast<std::size_t>(i)] = static_cast<double>(z);
            w[static_cast<std::size_t>(i)] = static_cast<double>(2 / ((1 - z * z) * dp * dp));
        }
    }
};

const GaussLegendre& gl16() {
    static const GaussLegendre g;
    return g;
}

long double binom(int n, int k) {
    long double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// frac(Φ(c + t)) with c a short dyadic and t small.
long double phase_at(const OscIntegrand& g, double c, double t) {
    long double acc = 0;
    for (const auto& [shift, sign] : g.phase) {
        const double y0 = c + shift;
        long double s = frac_pow(y0, g.d);
        long double tp = 1;
        for (int i = 1; i <= g.d; ++i) {
            tp *= t;
            s += binom(g.d, i) * std::pow(static_cast<long double>(y0), g.d - i) * tp;
        }
        acc += sign * s;
    }
    acc -= std::floor(acc);
    return acc;
}

double phase_deriv(const OscIntegrand& g, double u) {
    double s = 0;
    for (const auto& [shift, sign] : g.phase) s += sign * g.d * std::pow(u + shift, g.d - 1);
    return s;
}

double amp_at(const OscIntegrand& g, double u) {
    double a = g.scale;
    for (const auto& [shift, band] : g.amp) a *= band_eval(band, u + shift);
    return a;
}

// Upper bound for |amplitude| on [a, b]; χ is nonincreasing on [0, ∞).
double amp_bound(const OscIntegrand& g, double a, double b) {
    double m = std::fabs(g.scale);
    for (const auto& [shift, band] : g.amp) {
        const double ya = a + shift, yb = b + shift;
        const double hi = band.H > 0 ? chi_pos(ya / band.H) : 1.0;
        const double lo = band.L > 0 ? chi_pos(yb / band.L) : 0.0;
        m *= std::max(0.0, hi - lo) / ya;
    }
    return m;
}

// Scale on which the amplitude varies near [a, b].
double amp_scale(const OscIntegrand& g, double a) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& [shift, band] : g.amp) {
        if (band.L > 0) s = std::min(s, band.L / 4);
        if (band.H > 0) s = std::min(s, band.H / 4);
        s = std::min(s, std::max(a + shift, 1e-300));
    }
    return s;
}

struct SeriesOut {
    cplx value = 0;  // series value without the e(Φ) factor
    double last = 0;  // magnitude of the final included term
    double next_g = 0;  // |g_{N}| (for the remainder integrand)
};

SeriesOut ibp_series(const OscIntegrand& g, double u) {
    J phi_d(0.0);
    for (const auto& [shift, sign] : g.phase) {
        J y = J::variable(u + shift), p(1.0);
        for (int i = 0; i < g.d - 1; ++i) p = p * y;
        phi_d += static_cast<double>(sign * g.d) * p;
    }
    J w = recip(cplx(0, static_cast<double>(kTwoPi)) * phi_d);
    J amp(g.scale);
    for (const auto& [shift, band] : g.amp) amp = amp * band_eval(band, J::variable(u + shift));
    SeriesOut out;
    J cur = amp;
    for (int n = 0; n < kJetOrder - 1; ++n) {
        J h = cur * w;
        out.value += h.c[0];
        out.last = std::abs(h.c[0]);
        cur = -h.derivative();
    }
    out.next_g = std::abs(cur.c[0]);
    return out;
}

cplx gl_panels(const OscIntegrand& g, double a, double b, int oversampling, std::uint64_t max_nodes,
               QuadStats* stats) {
    constexpr int kBlocks = 16;
    const auto& gl = gl16();
    const double width = (b - a) / kBlocks;
    const double sa = amp_scale(g, a);
    // 16 nodes per panel; oversampling nodes per wavelength.
    const double cycles_per_panel = 16.0 / std::max(8, oversampling);
    std::uint64_t nodes = 0;
    std::vector<std::uint64_t> np(kBlocks);
    for (int blk = 0; blk < kBlocks; ++blk) {
        const double lo = a + blk * width, hi = lo + width;
        const double fmax = std::max(std::fabs(phase_deriv(g, lo)), std::fabs(phase_deriv(g, hi)));
        double need = std::max({width * fmax / cycles_per_panel, width / (sa / 4), 1.0});
        std::uint64_t n = std::bit_ceil(static_cast<std::uint64_t>(std::ceil(need)));
        np[static_cast<std::size_t>(blk)] = n;
        nodes += 16 * n;
    }
    if (max_nodes && nodes > max_nodes) throw ResourceError("oscillatory quadrature", nodes, max_nodes);
    std::complex<long double> acc = 0;
    for (int blk = 0; blk < kBlocks; ++blk) {
        const double lo = a + blk * width;
        const auto n = np[static_cast<std::size_t>(blk)];
        const double pw = width / static_cast<double>(n);
        for (std::uint64_t p = 0; p < n; ++p) {
            const double c = lo + (static_cast<double>(p) + 0.5) * pw;
            std::complex<long double> pacc = 0;
            for (int i = 0; i < 16; ++i) {
                const double t = 0.5 * pw * gl.x[static_cast<std::size_t>(i)];
                const double A = amp_at(g, c + t);
                if (A == 0) continue;
                pacc += std::complex<long double>(expi(phase_at(g, c, t))) *
                        static_cast<long double>(A * gl.w[static_cast<std::size_t>(i)]);
            }
            acc += pacc * static_cast<long double>(0.5 * pw);
        }
    }
    if (stats) {
        stats->nodes += nodes;
        stats->panels += 1;
    }
    return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
}

}  // namespace

// ---------------------------------------------------------------- phases

long double frac_pow(double y, int d) {
    if (y == 0 || d < 1) return 0;
    const bool neg = y < 0;
    const double ay = std::fabs(y);
    int e;
    const double m = std::frexp(ay, &e);
    auto M = static_cast<std::uint64_t>(std::ldexp(m, 53));
    int q = 53 - e;
    const int tz = std::countr_zero(M);
    M >>= tz;
    q -= tz;
    long double f;
    if (q <= 0) {
        f = 0;
    } else if (q * d <= 126) {
        unsigned __int128 r = 1;
        for (int i = 0; i < d; ++i) r *= M;  // wraps mod 2^128, exact mod 2^{qd}
        const int bits = q * d;
        r &= (static_cast<unsigned __int128>(1) << bits) - 1;
        f = std::ldexp(static_cast<long double>(r), -bits);
    } else {
        long double p = std::pow(static_cast<long double>(ay), d);
        f = p - std::floor(p);
    }
    if (neg && (d % 2 == 1) && f != 0) f = 1 - f;
    return f;
}

cplx expi(long double frac) {
    long double f = frac - std::nearbyint(frac);
    long double a = kTwoPi * f;
    return {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
}

std::uint64_t sample_budget() {
    if (const char* s = std::getenv("OSCLAB_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 10);
        if (end != s && v > 0) return v;
    }
    return std::uint64_t{1} << 24;
}

// ---------------------------------------------------------------- bump

double BumpRho::chi(double t) const { return chi_pos(std::fabs(t)); }

double BumpRho::operator()(double t) const {
    const double a = std::fabs(t);
    if (a <= 0.5 || a >= chi_support) return 0;
    const double v = (chi_pos(a) - chi_pos(2 * a)) / a;
    return t < 0 ? -v : v;
}

double BumpRho::sup_norm() const {
    static const double s = [this] {
        double m = 0;
        for (int i = 0; i <= 200000; ++i) m = std::max(m, std::fabs((*this)(0.5 + 0.75 * i / 200000.0)));
        return m;
    }();
    return s;
}

double BumpRho::l1_norm() const {
    static const double s = [this] {
        const auto& gl = gl16();
        long double acc = 0;
        const int panels = 4096;
        const double w = 0.75 / panels;
        for (int p = 0; p < panels; ++p)
            for (int i = 0; i < 16; ++i)
                acc += gl.w[static_cast<std::size_t>(i)] * 0.5 * w *
                       std::fabs((*this)(0.5 + (p + 0.5) * w + 0.5 * w * gl.x[static_cast<std::size_t>(i)]));
        return static_cast<double>(acc);
    }();
    return s;
}

double Band::support_hi() const {
    return H > 0 ? BumpRho::chi_support * H : std::numeric_limits<double>::infinity();
}

double Band::operator()(double y) const {
    if (y <= L || y >= support_hi()) return 0;
    return band_eval(*this, y);
}

Band Band::rho(int k) { return {std::ldexp(1.0, k - 1), std::ldexp(1.0, k)}; }
Band Band::rho_range(int a, int b) { return {std::ldexp(1.0, a - 1), std::ldexp(1.0, b)}; }

void KernelFamily::validate() const {
    if (d < 2) throw DomainError("degree must be >= 2");
    if (k0 < 0) throw DomainError("k0 must be >= 0");
    if (oversampling < 8) throw DomainError("oversampling must be >= 8");
}

double rho_eval(const BumpRho& rho, double t) { return rho(t); }

double resolution_check(const BumpRho& rho, int M, const std::vector<double>& t_samples) {
    const double lo = std::ldexp(1.0, -M + 2), hi = std::ldexp(1.0, M - 2);
    double worst = 0;
    for (double t : t_samples) {
        const double a = std::fabs(t);
        if (a < lo || a > hi) throw RangeError("resolution sample outside safe range");
        long double s = 0;
        for (int i = -M; i <= M; ++i) s += std::ldexp(rho(std::ldexp(t, -i)), -i);
        worst = std::max(worst, static_cast<double>(std::fabs(s - 1.0L / t) * a));
    }
    return worst;
}

// ---------------------------------------------------------------- ψ_k

cplx psi_eval(const KernelFamily& fam, int k, double y) {
    if (y <= 0) return 0;
    const double r = std::ldexp(fam.rho(std::ldexp(y, -k)), -k);
    if (r == 0) return 0;
    return expi(frac_pow(y, fam.d)) * r;
}

double psi_sample_step(const KernelFamily& fam, int k) {
    const double bound = 1.0 / (fam.oversampling * fam.d * std::ldexp(1.0, (k + 1) * (fam.d - 1)));
    return std::ldexp(1.0, static_cast<int>(std::floor(std::log2(bound))));
}

Signal psi_sample(const KernelFamily& fam, int k) {
    fam.validate();
    if (k < fam.k0) throw DomainError("psi_sample requires k >= k0");
    const double h = psi_sample_step(fam, k);
    const double width = std::ldexp(1.0, k + 1);
    const auto count = static_cast<std::uint64_t>(width / h);
    if (count > sample_budget()) throw ResourceError("psi_sample", count, sample_budget());
    Signal s(0.0, width, h);
    for (std::size_t n = 0; n < s.size(); ++n) s[n] = psi_eval(fam, k, s.x(static_cast<std::ptrdiff_t>(n)));
    return s;
}

// ---------------------------------------------------------------- quadrature

cplx osc_integral(const OscIntegrand& g, double a, double b, int oversampling, double abs_tol,
                  std::uint64_t max_nodes, QuadStats* stats) {
    if (!(a < b)) return 0;
    for (const auto& [shift, band] : g.amp) {
        a = std::max(a, band.support_lo() - shift);
        b = std::min(b, band.support_hi() - shift);
    }
    if (!(a < b)) return 0;
    if (amp_bound(g, a, b) * (b - a) <= abs_tol) return 0;
    const double fa = phase_deriv(g, a), fb = phase_deriv(g, b);
    const double fmin = (fa > 0) == (fb > 0) ? std::min(std::fabs(fa), std::fabs(fb)) : 0;
    const double sa = amp_scale(g, a);
    if (fmin * std::min(b - a, sa) > 4) {
        SeriesOut A = ibp_series(g, a), B = ibp_series(g, b);
        // Remainder integrand sampled across the interval.
        const int samples = static_cast<int>(std::min(4096.0, std::ceil(4 * (b - a) / sa))) + 1;
        double rem = 0;
        for (int i = 1; i < samples; ++i) {
            const double u = a + (b - a) * i / samples;
            rem = std::max(rem, ibp_series(g, u).next_g);
        }
        rem = std::max({rem, A.next_g, B.next_g});
        const double err = A.last + B.last + (b - a) * rem;
        if (err <= abs_tol) {
            if (stats) stats->asymptotic += 1;
            auto e_at = [&](double u) { return expi(phase_at(g, u, 0.0)); };
            return e_at(b) * B.value - e_at(a) * A.value;
        }
    }
    return gl_panels(g, a, b, oversampling, max_nodes, stats);
}

double CellKernel::l1() const {
    double s = 0;
    for (const auto& v : w) s += std::abs(v);
    return s;
}

CellKernel build_cell_kernel(int d, const Band& band, double step, Side side, double eps, int oversampling,
                             double y_cap) {
    const double ylo = std::max(band.support_lo(), eps);
    const double yhi = std::min(band.support_hi(), y_cap);
    if (!std::isfinite(yhi)) throw DomainError("cell kernel needs a bounded band or a cap");
    if (!(ylo > 0) && band.support_lo() <= 0) throw DomainError("cell kernel of 1/y needs eps > 0");
    CellKernel K;
    K.step = step;
    if (!(ylo < yhi)) return K;
    const auto p0 = static_cast<std::ptrdiff_t>(std::floor(ylo / step + 0.5));
    const auto p1 = static_cast<std::ptrdiff_t>(std::ceil(yhi / step - 0.5));
    std::vector<cplx> pos;
    OscIntegrand g;
    g.d = d;
    g.phase = {{0.0, 1}};
    g.amp = {{0.0, band}};
    const double tol = 1e-16 * step / std::max(ylo, step);
    for (std::ptrdiff_t p = p0; p <= p1; ++p) {
        const double a = std::max((p - 0.5) * step, ylo);
        const double b = std::min((p + 0.5) * step, yhi);
        pos.push_back(a < b ? osc_integral(g, a, b, oversampling, tol, 0) : cplx(0));
    }
    auto neg_of = [d](cplx v) { return d % 2 == 0 ? -v : -std::conj(v); };
    const std::ptrdiff_t top = p0 + static_cast<std::ptrdiff_t>(pos.size()) - 1;
    if (side == Side::Positive) {
        K.p_min = p0;
        K.w = pos;
    } else if (side == Side::Negative) {
        K.p_min = -top;
        for (auto it = pos.rbegin(); it != pos.rend(); ++it) K.w.push_back(neg_of(*it));
    } else {
        K.p_min = -top;
        K.w.assign(static_cast<std::size_t>(2 * top + 1), cplx(0));
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const std::ptrdiff_t p = p0 + static_cast<std::ptrdiff_t>(i);
            K.w[static_cast<std::size_t>(p + top)] += pos[i];
            K.w[static_cast<std::size_t>(-p + top)] += neg_of(pos[i]);
        }
    }
    return K;
}

CellKernel psi_cell_kernel(const KernelFamily& fam, int k, double step) {
    return build_cell_kernel(fam.d, Band::rho(k), step, Side::Positive, 0, fam.oversampling);
}

}  // namespace osclab
