#pragma once

#include <vector>

#include "json.hpp"
#include "osclab/operators.hpp"

namespace osclab {

/// Intervals S with witness sets E_S ⊆ S given as unions of cells of the
/// grid (lo, step).
struct SparseCollection {
    double lo = 0, step = 1;
    std::vector<Interval> intervals;
    std::vector<std::vector<CellRange>> witnesses;
    double eta = 0;

    std::size_t size() const { return intervals.size(); }
    void add(const Interval& S, std::vector<CellRange> E);
    double witness_measure(std::size_t i) const;
};

struct SparsityCheck {
    bool ok = false;
    bool disjoint = false;
    double eta = 1;  // least |E_S| / |S|; 1 for an empty collection
};

/// Σ_S |S| ⟨f⟩_{S,r} ⟨g⟩_{S,s}.
double sparse_form(const SparseCollection& S, const Signal& f, const Signal& g, double r, double s);
SparsityCheck verify_sparsity(const SparseCollection& S);

/// Maximal K ⊊ I0 of I0's grid, down to scale k_min, with ⟨f⟩_K > 10⟨f⟩_{I0}
/// or ⟨g⟩_K > 10⟨g⟩_{I0}. Averages are exact integrals of the step functions.
std::vector<DyadicInterval> stopping_children(const Signal& f, const Signal& g, const DyadicInterval& I0, int k_min);
/// Same selection by scanning every descendant; used as an oracle.
std::vector<DyadicInterval> stopping_children_scan(const Signal& f, const Signal& g, const DyadicInterval& I0,
                                                   int k_min);
inline constexpr double stopping_threshold = 10;
/// Finest scale used by stopping times: k_min, but no finer than one cell.
int finest_scale(const Signal& f, int k_min);

struct SparseBoundReport {
    double r = 2, s = 2;  // form exponents (1, r') are reported as r = 1, s = r'
    double form = 0, pairing = 0, ratio = 0;
    int depth = 0;
    std::size_t size = 0;
    bool partial = false;
    double eta = 0;
    double worst_union_fraction = 0;  // max over nodes of |E| / |K|
    long straddlers = 0;              // intervals kept in a node's family that contain a stopping child
    double above_constant = 0;        // sup on I0 of Σ_{J ⊋ I0} |T_J f| / ⟨f⟩_{I0}
};

nlohmann::json to_json(const SparseBoundReport& r);
nlohmann::json to_json(const SparseCollection& S);

/// Intervals of I0's grid inside I0 with scale ≥ k0 + 2.
std::vector<DyadicInterval> sparse_family(const OperatorConfig& cfg, const DyadicInterval& I0);

struct SparseWitness {
    SparseCollection collection;
    SparseBoundReport report;
    double pairing = 0;  // ⟨T_* f, g⟩ over sparse_family
};

/// Stopping-time recursion from I0. The report's form uses exponents (1, r').
SparseWitness build_sparse_witness(const OperatorConfig& cfg, const Signal& f, const Signal& g,
                                   const DyadicInterval& I0, int max_depth = 30, double r = 2);

struct SparseConstantRow {
    std::size_t pair = 0;
    bool skipped = false;
    double pairing = 0, form = 0, ratio = 0;
    double eta = 0;
    bool partial = false;
    bool sparse = false;  // verify_sparsity passed
    double union_fraction = 0;
};

struct SparseConstant {
    double r = 2;
    double worst_ratio = 0;
    std::vector<SparseConstantRow> table;
};

using SignalPair = std::pair<Signal, Signal>;

SparseConstant estimate_sparse_constant(const OperatorConfig& cfg, const std::vector<SignalPair>& corpus,
                                        const DyadicInterval& I0, double r);

/// estimate_sparse_constant for several r, building each witness once.
std::vector<SparseConstant> sparse_scaling_study(const OperatorConfig& cfg, const std::vector<SignalPair>& corpus,
                                                 const DyadicInterval& I0, const std::vector<double>& rs);

}  // namespace osclab
