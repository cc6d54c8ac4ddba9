#include "osclab/stats.hpp"

#include <algorithm>
#include <limits>

#include "osclab/errors.hpp"

namespace osclab {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0) throw DomainError("slope fit needs distinct abscissae");
    return sxy / sxx;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double positive_span(const std::vector<double>& v, int* positive) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    int count = 0;
    for (double x : v)
        if (x > 0) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            ++count;
        }
    if (positive) *positive = count;
    return count == 0 ? 1.0 : hi / lo;
}

}  // namespace osclab

#include "osclab/parallel.hpp"

namespace osclab {

namespace {
std::atomic<int> g_threads{0};
}

int thread_count() {
    int n = g_threads.load();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void set_thread_count(int n) { g_threads.store(std::max(0, n)); }

}  // namespace osclab
