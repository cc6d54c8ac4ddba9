#include "osclab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "osclab/errors.hpp"

namespace osclab {

namespace {
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
}  // namespace

int grid_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

std::int64_t DyadicInterval::num() const { return 3 * n + grid_sign(k) * (grid - 1); }
double DyadicInterval::lo() const { return std::ldexp(static_cast<double>(num()), k) / 3; }
double DyadicInterval::hi() const { return std::ldexp(static_cast<double>(num() + 3), k) / 3; }
double DyadicInterval::length() const { return std::ldexp(1.0, k); }

Interval DyadicInterval::middle_third() const {
    return {std::ldexp(static_cast<double>(num() + 1), k) / 3, std::ldexp(static_cast<double>(num() + 2), k) / 3};
}

DyadicInterval DyadicInterval::parent() const {
    return {grid, k + 1, floor_div(n - grid_sign(k + 1) * (grid - 1), 2)};
}

std::pair<DyadicInterval, DyadicInterval> DyadicInterval::children() const {
    const std::int64_t m = 2 * n + grid_sign(k) * (grid - 1);
    return {{grid, k - 1, m}, {grid, k - 1, m + 1}};
}

DyadicInterval DyadicInterval::ancestor(int scale) const {
    DyadicInterval a = *this;
    while (a.k < scale) a = a.parent();
    return a;
}

bool DyadicInterval::inside(const DyadicInterval& other) const {
    return grid == other.grid && k <= other.k && ancestor(other.k) == other;
}

DyadicInterval locate(int grid, int k, double x) {
    const double t = (3 * std::ldexp(x, -k) - grid_sign(k) * (grid - 1)) / 3;
    return {grid, k, static_cast<std::int64_t>(std::floor(t))};
}

void GridFamily::validate() const {
    if (!(window.lo < window.hi)) throw DomainError("grid window must be nonempty");
    if (k_min > k_max) throw DomainError("grid needs k_min <= k_max");
}

std::vector<DyadicInterval> grid_at_scale(const GridFamily& g, int grid, int k) {
    if (k < g.k_min || k > g.k_max) throw DomainError("scale outside grid family range");
    std::vector<DyadicInterval> out;
    const auto a = locate(grid, k, g.window.lo).n - 1, b = locate(grid, k, g.window.hi).n + 1;
    for (auto n = a; n <= b; ++n) {
        DyadicInterval I{grid, k, n};
        if (I.lo() < g.window.hi && I.hi() > g.window.lo) out.push_back(I);
    }
    return out;
}

std::vector<DyadicInterval> grids_at_scale(const GridFamily& g, int k) {
    std::vector<DyadicInterval> out;
    for (int grid = 1; grid <= 3; ++grid) {
        auto v = grid_at_scale(g, grid, k);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

std::pair<DyadicInterval, DyadicInterval> children(const GridFamily& g, const DyadicInterval& I) {
    if (I.k <= g.k_min) throw DomainError("no children below the minimum scale");
    return I.children();
}

std::vector<DyadicInterval> maximal_intervals(const std::vector<DyadicInterval>& candidates,
                                              const std::function<bool(const DyadicInterval&)>& pred) {
    if (candidates.empty()) return {};
    const int grid = candidates.front().grid;
    std::vector<DyadicInterval> sel;
    for (const auto& I : candidates) {
        if (I.grid != grid) throw DomainError("maximal_intervals needs candidates from one grid");
        if (pred(I)) sel.push_back(I);
    }
    std::sort(sel.begin(), sel.end(), [](const auto& a, const auto& b) { return a.k != b.k ? a.k > b.k : a.n < b.n; });
    std::set<std::pair<int, std::int64_t>> kept;
    std::vector<DyadicInterval> out;
    const int top = sel.empty() ? 0 : sel.front().k;
    for (const auto& I : sel) {
        bool covered = false;
        for (DyadicInterval a = I; a.k <= top; a = a.parent())
            if (kept.count({a.k, a.n})) {
                covered = true;
                break;
            }
        if (!covered) {
            kept.insert({I.k, I.n});
            out.push_back(I);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lo() < b.lo(); });
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i - 1].hi() > out[i].lo()) throw StructuralError("maximal intervals overlap");
    return out;
}

std::vector<DyadicInterval> maximal_subintervals(const DyadicInterval& I0, int k_lo,
                                                 const std::function<bool(const DyadicInterval&)>& pred) {
    std::vector<DyadicInterval> out, todo;
    if (I0.k > k_lo) {
        auto [l, r] = I0.children();
        todo = {r, l};
    }
    while (!todo.empty()) {
        const DyadicInterval K = todo.back();
        todo.pop_back();
        if (pred(K)) {
            out.push_back(K);
        } else if (K.k > k_lo) {
            auto [l, r] = K.children();
            todo.push_back(r);
            todo.push_back(l);
        }
    }
    return out;
}

int partition_violations(int k, const std::vector<double>& xs) {
    int bad = 0;
    for (double x : xs) {
        int hits = 0;
        for (int grid = 1; grid <= 3; ++grid) {
            const auto mt = locate(grid, k, x).middle_third();
            if (mt.lo <= x && x < mt.hi) ++hits;
        }
        if (hits != 1) ++bad;
    }
    return bad;
}

std::vector<DyadicInterval> descendants(const DyadicInterval& top, int k_lo) {
    std::vector<DyadicInterval> out{top};
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i].k > k_lo) {
            auto [l, r] = out[i].children();
            out.push_back(l);
            out.push_back(r);
        }
    return out;
}

CellRange cells(const Signal& s, const DyadicInterval& I) { return cell_range(s, I.interval()); }
CellRange middle_cells(const Signal& s, const DyadicInterval& I) { return cell_range(s, I.middle_third()); }

nlohmann::json to_json(const DyadicInterval& I) {
    return {{"grid", I.grid}, {"k", I.k}, {"n", I.n}, {"lo", I.lo()}, {"hi", I.hi()}};
}

}  // namespace osclab
