#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace osclab {

/// Truncated Taylor series c[0] + c[1] e + ... + c[N] e^N about a point.
template <int N>
struct Jet {
    using cplx = std::complex<double>;
    std::array<cplx, N + 1> c{};

    Jet() = default;
    Jet(cplx v) { c[0] = v; }
    Jet(double v) { c[0] = v; }

    static Jet variable(double x) {
        Jet j(x);
        if constexpr (N >= 1) j.c[1] = 1.0;
        return j;
    }

    cplx value() const { return c[0]; }

    Jet& operator+=(const Jet& o) {
        for (int i = 0; i <= N; ++i) c[i] += o.c[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int i = 0; i <= N; ++i) c[i] -= o.c[i];
        return *this;
    }
    Jet& operator*=(cplx s) {
        for (auto& v : c) v *= s;
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a) { return a *= -1.0; }
    friend Jet operator*(Jet a, cplx s) { return a *= s; }
    friend Jet operator*(cplx s, Jet a) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator+(Jet a, double s) {
        a.c[0] += s;
        return a;
    }
    friend Jet operator+(double s, Jet a) { return a + s; }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
    friend Jet operator-(Jet a, double s) { return a + (-s); }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int i = 0; i <= N; ++i)
            for (int j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
        return r;
    }

    friend Jet recip(const Jet& a) {
        Jet r;
        r.c[0] = 1.0 / a.c[0];
        for (int n = 1; n <= N; ++n) {
            cplx s = 0;
            for (int i = 1; i <= n; ++i) s += a.c[i] * r.c[n - i];
            r.c[n] = -s * r.c[0];
        }
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
    friend Jet operator/(double s, const Jet& b) { return s * recip(b); }

    friend Jet exp(const Jet& a) {
        Jet r;
        r.c[0] = std::exp(a.c[0]);
        for (int n = 1; n <= N; ++n) {
            cplx s = 0;
            for (int k = 1; k <= n; ++k) s += static_cast<double>(k) * a.c[k] * r.c[n - k];
            r.c[n] = s / static_cast<double>(n);
        }
        return r;
    }

    // Derivative; the top coefficient becomes unknown and is set to zero.
    Jet derivative() const {
        Jet r;
        for (int i = 0; i < N; ++i) r.c[i] = static_cast<double>(i + 1) * c[i + 1];
        return r;
    }
};

}  // namespace osclab
