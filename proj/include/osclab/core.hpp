#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace osclab {

using cplx = std::complex<double>;

struct Interval {
    double lo = 0, hi = 1;
    Interval() = default;
    Interval(double lo, double hi);
    double length() const { return hi - lo; }
};

// Half-open range of cell indices [first, last).
struct CellRange {
    std::ptrdiff_t first = 0, last = 0;
    std::ptrdiff_t size() const { return last > first ? last - first : 0; }
    bool empty() const { return last <= first; }
};

/// Piecewise-constant function on a uniform grid.
///
/// Cell n is [lo + n h, lo + (n+1) h) and carries values[n], the value at its
/// midpoint. Everything downstream treats a Signal as that step function, so
/// integrals over cells are exact.
class Signal {
public:
    Signal() = default;
    Signal(double lo, double hi, double step);
    Signal(double lo, double hi, double step, std::vector<cplx> values);

    static Signal sample(double lo, double hi, double step, const std::function<cplx(double)>& fn);
    static Signal zeros_like(const Signal& s);

    double lo() const { return lo_; }
    double hi() const { return lo_ + step_ * static_cast<double>(values_.size()); }
    double step() const { return step_; }
    std::size_t size() const { return values_.size(); }
    double x(std::ptrdiff_t n) const { return lo_ + (static_cast<double>(n) + 0.5) * step_; }

    const std::vector<cplx>& values() const { return values_; }
    std::vector<cplx>& values() { return values_; }
    cplx operator[](std::size_t n) const { return values_[n]; }
    cplx& operator[](std::size_t n) { return values_[n]; }

    bool same_grid(const Signal& o) const;
    double sup_norm() const;
    std::vector<double> abs_values() const;
    Signal abs() const;

    Signal& operator+=(const Signal& o);
    Signal& operator-=(const Signal& o);
    Signal& operator*=(cplx c);

private:
    void check() const;
    double lo_ = 0, step_ = 1;
    std::vector<cplx> values_;
};

Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(cplx c, Signal a);

/// Cells whose midpoints lie in [I.lo, I.hi).
CellRange cell_range(const Signal& s, const Interval& I);
CellRange cell_range(double lo, double step, std::size_t n, const Interval& I);

/// Exact integral of the step function over [a, b].
cplx integrate(const Signal& f, double a, double b);

/// (|I|^{-1} ∫_I |f|^r)^{1/r}, with I snapped to the cells it contains.
double average_r(const Signal& f, const Interval& I, double r);

/// Hardy-Littlewood maximal function over all cell-aligned intervals.
Signal hl_maximal(const Signal& f);

/// Prefix sums of a real sequence; sum(a, b) is the sum over [a, b).
class Prefix {
public:
    Prefix() = default;
    explicit Prefix(const std::vector<double>& v);
    double sum(std::ptrdiff_t a, std::ptrdiff_t b) const {
        return static_cast<double>(p_[static_cast<std::size_t>(b)] - p_[static_cast<std::size_t>(a)]);
    }
    std::size_t size() const { return p_.empty() ? 0 : p_.size() - 1; }

private:
    std::vector<long double> p_;
};

/// Exact integrals of |f|^p over arbitrary subintervals of the window in O(1).
class AbsIntegral {
public:
    explicit AbsIntegral(const Signal& f, double p = 1);
    double integral(double a, double b) const;
    double mean(const Interval& I) const { return integral(I.lo, I.hi) / I.length(); }

private:
    double lo_ = 0, step_ = 1;
    std::vector<double> v_;
    Prefix P_;
};

double norm_p(const Signal& f, double p);
cplx inner(const Signal& f, const Signal& g);

void write_csv(const Signal& s, const std::string& path, bool complex_values);
Signal read_csv(const std::string& path);

}  // namespace osclab
