#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "osclab/core.hpp"

namespace osclab {

/// Interval of grid `grid` (1, 2 or 3) at scale k and position n:
/// lo = 2^k (n + (−1)^k (grid−1)/3), hi = lo + 2^k.
struct DyadicInterval {
    int grid = 1;
    int k = 0;
    std::int64_t n = 0;

    // lo = 2^k · num / 3 with num an integer.
    std::int64_t num() const;
    double lo() const;
    double hi() const;
    double length() const;
    Interval interval() const { return {lo(), hi()}; }
    Interval middle_third() const;

    DyadicInterval parent() const;
    std::pair<DyadicInterval, DyadicInterval> children() const;
    DyadicInterval ancestor(int scale) const;
    // Same grid and this ⊆ other.
    bool inside(const DyadicInterval& other) const;
    bool operator==(const DyadicInterval& o) const = default;
    auto operator<=>(const DyadicInterval& o) const = default;
};

int grid_sign(int k);  // (−1)^k

/// Interval of grid `grid` and scale k containing x.
DyadicInterval locate(int grid, int k, double x);

struct GridFamily {
    Interval window;
    int k_min = 0, k_max = 0;
    void validate() const;
};

std::vector<DyadicInterval> grids_at_scale(const GridFamily& g, int k);
std::vector<DyadicInterval> grid_at_scale(const GridFamily& g, int grid, int k);
std::pair<DyadicInterval, DyadicInterval> children(const GridFamily& g, const DyadicInterval& I);

/// ⊆-maximal candidates satisfying `pred`. Candidates must share one grid.
std::vector<DyadicInterval> maximal_intervals(const std::vector<DyadicInterval>& candidates,
                                              const std::function<bool(const DyadicInterval&)>& pred);

/// Maximal strict subintervals of I0 with scale ≥ k_lo satisfying `pred`, found
/// top-down and returned left to right.
std::vector<DyadicInterval> maximal_subintervals(const DyadicInterval& I0, int k_lo,
                                                 const std::function<bool(const DyadicInterval&)>& pred);

/// Number of samples x at scale k not lying in exactly one middle third.
int partition_violations(int k, const std::vector<double>& xs);

/// All intervals of one grid inside `top` with scale in [k_lo, top.k].
std::vector<DyadicInterval> descendants(const DyadicInterval& top, int k_lo);

CellRange cells(const Signal& s, const DyadicInterval& I);
CellRange middle_cells(const Signal& s, const DyadicInterval& I);

nlohmann::json to_json(const DyadicInterval& I);

}  // namespace osclab
