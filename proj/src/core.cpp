#include "osclab/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "osclab/errors.hpp"

namespace osclab {

Interval::Interval(double lo, double hi) : lo(lo), hi(hi) {
    if (!(lo < hi)) throw DomainError("interval requires lo < hi");
}

Signal::Signal(double lo, double hi, double step) : lo_(lo), step_(step) {
    if (!(step > 0) || !(lo < hi)) throw DomainError("signal requires step > 0 and lo < hi");
    auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
    if (n < 1) throw DomainError("signal needs at least one sample");
    values_.assign(n, cplx(0, 0));
}

Signal::Signal(double lo, double hi, double step, std::vector<cplx> values) : Signal(lo, hi, step) {
    if (values.size() != values_.size()) throw DomainError("sample count does not match window/step");
    values_ = std::move(values);
    check();
}

Signal Signal::sample(double lo, double hi, double step, const std::function<cplx(double)>& fn) {
    Signal s(lo, hi, step);
    for (std::size_t n = 0; n < s.size(); ++n) s.values_[n] = fn(s.x(static_cast<std::ptrdiff_t>(n)));
    s.check();
    return s;
}

Signal Signal::zeros_like(const Signal& s) {
    Signal z = s;
    std::fill(z.values_.begin(), z.values_.end(), cplx(0, 0));
    return z;
}

void Signal::check() const {
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("non-finite sample");
}

bool Signal::same_grid(const Signal& o) const {
    return size() == o.size() && lo_ == o.lo_ && step_ == o.step_;
}

double Signal::sup_norm() const {
    double m = 0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> Signal::abs_values() const {
    std::vector<double> a(values_.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(values_[i]);
    return a;
}

Signal Signal::abs() const {
    Signal r = *this;
    for (auto& v : r.values_) v = std::abs(v);
    return r;
}

Signal& Signal::operator+=(const Signal& o) {
    if (!same_grid(o)) throw DomainError("grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

Signal& Signal::operator-=(const Signal& o) {
    if (!same_grid(o)) throw DomainError("grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

Signal& Signal::operator*=(cplx c) {
    for (auto& v : values_) v *= c;
    return *this;
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(cplx c, Signal a) { return a *= c; }

CellRange cell_range(double lo, double step, std::size_t n, const Interval& I) {
    auto first_at = [&](double t) {
        double u = std::ceil((t - lo) / step - 0.5);
        u = std::clamp(u, 0.0, static_cast<double>(n));
        return static_cast<std::ptrdiff_t>(u);
    };
    return {first_at(I.lo), first_at(I.hi)};
}

CellRange cell_range(const Signal& s, const Interval& I) { return cell_range(s.lo(), s.step(), s.size(), I); }

cplx integrate(const Signal& f, double a, double b) {
    double sign = 1;
    if (a > b) {
        std::swap(a, b);
        sign = -1;
    }
    const double tol = 1e-12 * (f.hi() - f.lo());
    if (a < f.lo() - tol || b > f.hi() + tol) throw RangeError("integration range outside window");
    const double h = f.step();
    const double ua = std::clamp((a - f.lo()) / h, 0.0, static_cast<double>(f.size()));
    const double ub = std::clamp((b - f.lo()) / h, 0.0, static_cast<double>(f.size()));
    auto ia = static_cast<std::size_t>(std::floor(ua));
    auto ib = static_cast<std::size_t>(std::floor(ub));
    std::complex<long double> acc = 0;
    if (ia == ib) {
        if (ia < f.size()) acc += std::complex<long double>(f[ia]) * static_cast<long double>(ub - ua);
    } else {
        acc += std::complex<long double>(f[ia]) * static_cast<long double>(ia + 1 - ua);
        for (std::size_t i = ia + 1; i < ib; ++i) acc += std::complex<long double>(f[i]);
        if (ib < f.size()) acc += std::complex<long double>(f[ib]) * static_cast<long double>(ub - ib);
    }
    return sign * cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag())) * h;
}

double average_r(const Signal& f, const Interval& I, double r) {
    if (r < 1) throw DomainError("average_r requires r >= 1");
    const double tol = 1e-12 * (f.hi() - f.lo());
    if (I.lo < f.lo() - tol || I.hi > f.hi() + tol) throw RangeError("interval outside window");
    CellRange c = cell_range(f, I);
    if (c.empty()) throw DomainError("interval contains no grid points");
    // Scale by the sup before powering so large r does not overflow.
    double m = 0;
    for (auto i = c.first; i < c.last; ++i) m = std::max(m, std::abs(f[static_cast<std::size_t>(i)]));
    if (m == 0) return 0;
    long double acc = 0;
    for (auto i = c.first; i < c.last; ++i)
        acc += std::pow(static_cast<long double>(std::abs(f[static_cast<std::size_t>(i)]) / m), r);
    return m * static_cast<double>(std::pow(acc / c.size(), 1.0L / r));
}

Prefix::Prefix(const std::vector<double>& v) : p_(v.size() + 1, 0.0L) {
    for (std::size_t i = 0; i < v.size(); ++i) p_[i + 1] = p_[i] + v[i];
}

AbsIntegral::AbsIntegral(const Signal& f, double p) : lo_(f.lo()), step_(f.step()), v_(f.size()) {
    for (std::size_t i = 0; i < f.size(); ++i) v_[i] = std::pow(std::abs(f[i]), p);
    P_ = Prefix(v_);
}

double AbsIntegral::integral(double a, double b) const {
    const double n = static_cast<double>(v_.size());
    const double ua = std::clamp((a - lo_) / step_, 0.0, n), ub = std::clamp((b - lo_) / step_, 0.0, n);
    if (ub <= ua) return 0;
    const auto ia = static_cast<std::ptrdiff_t>(std::floor(ua)), ib = static_cast<std::ptrdiff_t>(std::floor(ub));
    const auto at = [&](std::ptrdiff_t i) { return i < static_cast<std::ptrdiff_t>(v_.size()) ? v_[static_cast<std::size_t>(i)] : 0.0; };
    if (ia == ib) return at(ia) * (ub - ua) * step_;
    return (at(ia) * (static_cast<double>(ia + 1) - ua) + P_.sum(ia + 1, ib) + at(ib) * (ub - static_cast<double>(ib))) *
           step_;
}

Signal hl_maximal(const Signal& f) {
    const auto a = f.abs_values();
    const auto N = static_cast<std::ptrdiff_t>(a.size());
    Prefix P(a);
    std::vector<double> M(a.begin(), a.end());
    std::vector<double> suffix(static_cast<std::size_t>(N) + 1);
    // For each left end s, suffix[n] = max over right ends e > n of avg[s, e).
    for (std::ptrdiff_t s = 0; s < N; ++s) {
        double best = 0;
        for (std::ptrdiff_t e = N; e > s; --e) {
            best = std::max(best, P.sum(s, e) / static_cast<double>(e - s));
            suffix[static_cast<std::size_t>(e - 1)] = best;
        }
        for (std::ptrdiff_t n = s; n < N; ++n)
            M[static_cast<std::size_t>(n)] = std::max(M[static_cast<std::size_t>(n)], suffix[static_cast<std::size_t>(n)]);
    }
    Signal out = Signal::zeros_like(f);
    for (std::size_t i = 0; i < M.size(); ++i) out[i] = M[i];
    return out;
}

double norm_p(const Signal& f, double p) {
    if (std::isinf(p)) return f.sup_norm();
    double m = f.sup_norm();
    if (m == 0) return 0;
    long double acc = 0;
    for (const auto& v : f.values()) acc += std::pow(static_cast<long double>(std::abs(v) / m), p);
    return m * static_cast<double>(std::pow(acc * f.step(), 1.0L / p));
}

cplx inner(const Signal& f, const Signal& g) {
    if (!f.same_grid(g)) throw DomainError("grid mismatch");
    std::complex<long double> acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        acc += std::complex<long double>(f[i] * std::conj(g[i]));
    return cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag())) * f.step();
}

void write_csv(const Signal& s, const std::string& path, bool complex_values) {
    std::ofstream out(path);
    if (!out) throw RangeError("cannot open " + path);
    out << std::setprecision(17);
    out << (complex_values ? "x,re,im\n" : "x,value\n");
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << s.x(static_cast<std::ptrdiff_t>(i)) << ',' << s[i].real();
        if (complex_values) out << ',' << s[i].imag();
        out << '\n';
    }
}

Signal read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RangeError("cannot open " + path);
    std::vector<double> xs;
    std::vector<cplx> vs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, re, im = 0;
        if (!(ls >> x >> re)) continue;  // header
        ls >> im;
        xs.push_back(x);
        vs.emplace_back(re, im);
    }
    if (xs.size() < 2) throw DomainError(path + ": need at least two samples");
    const double h = xs[1] - xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - xs[i - 1] - h) > 1e-9 * std::abs(h)) throw DomainError(path + ": non-uniform grid");
    const double lo = xs[0] - h / 2;
    return Signal(lo, lo + h * static_cast<double>(xs.size()), h, std::move(vs));
}

}  // namespace osclab
