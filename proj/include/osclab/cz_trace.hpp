#pragma once

#include <map>
#include <vector>

#include "json.hpp"
#include "osclab/operators.hpp"

namespace osclab {

/// f = γ + b with b = Σ_{J ∈ 𝓑} f 1_J, 𝓑 the maximal J ⊊ I0 with ⟨f⟩_J > K.
/// f is rescaled so that ⟨f⟩_{I0} = 1; `scale` is the factor applied.
struct GoodBadSplit {
    DyadicInterval I0;
    double K = 10;
    int k0 = 3;
    double scale = 1;
    Signal f;  // normalized, restricted to I0
    std::vector<DyadicInterval> bad;
    Signal gamma, b;
    std::map<int, Signal> B;  // B_k, grouped by max(2^{k0}, |J|) = 2^k
    Signal zero;
    const Signal& B_at(int k) const;
};

GoodBadSplit good_bad_split(const Signal& f, const DyadicInterval& I0, double K, int k0, int k_min);

struct BadPartReport {
    double reconstruction_error = 0;  // sup |f − γ − Σ B_k|
    double gamma_ratio = 0;           // ‖γ‖_∞ / (2K)
    double bsum = 0;                  // Σ ‖B_k‖₁ / |I0|
    std::map<int, double> bi_ratio;   // sup over |K| = 2^j of ∫_K B_j / 2^j
};

BadPartReport bad_part_report(const GoodBadSplit& split);

/// Intervals of I0's grid inside I0 with scale ≥ k0 + 2 that are not contained
/// in a maximal interval where ⟨f⟩ > K or ⟨g⟩ > K⟨g⟩_{I0}.
std::vector<DyadicInterval> trace_family(const OperatorConfig& cfg, const GoodBadSplit& split, const Signal& g);

enum class NonStandardTest {
    Paired,     // ⟨|T_I*T_I B|, B 1_{I'}⟩ against the same pairing of the local term
    Pointwise,  // the inequality at every cell of I'
};

struct Classified {
    DyadicInterval I;
    bool nonstandard = false;
    double lhs = 0, rhs = 0;
    double mass = 0;  // ∫_I B_{j−s}
    Patch TB;         // T_I B_{j−s}
};

struct CollectionSplit {
    int s = 0;
    double c_same = 0;
    NonStandardTest test = NonStandardTest::Paired;
    std::vector<Classified> items;  // ordered by scale, then position
    int skipped = 0;                // intervals with j − s < k0
    std::size_t nonstandard_count() const;
    std::size_t standard_count() const { return items.size() - nonstandard_count(); }
};

CollectionSplit split_standard_nonstandard(const OperatorConfig& cfg, const GoodBadSplit& split,
                                           const std::vector<DyadicInterval>& family, int s, double c_same,
                                           NonStandardTest test = NonStandardTest::Paired);

/// min over I ∈ 𝓝(j,s) of ∫_I B_{j−s} / (2^{−s}|I|); 0 when 𝓝 is empty.
double nonstandard_lower_constant(const CollectionSplit& cs);

struct CarlesonRow {
    DyadicInterval J;
    double mass = 0, ratio = 0;
};

struct CarlesonResult {
    double worst_ratio = 0;
    std::vector<CarlesonRow> table;
};

/// For J in the family: Σ_{I ∈ 𝓝, I ⊆ J} |I| / (2^s |J|).
CarlesonResult carleson_check(const CollectionSplit& cs, const std::vector<DyadicInterval>& family);

struct ExceptionalSet {
    std::vector<char> mask;  // per cell of the window
    std::vector<int> overlap;
    double threshold = 0, fraction = 0;
};

/// F_s = {Σ_{I ∈ 𝓝} 1_I > C max(s,1) 2^s}.
ExceptionalSet exceptional_set(const CollectionSplit& cs, const Signal& like, const DyadicInterval& I0, double C);
/// Least C = 2^m (m ≥ 0) with |F_s| ≤ |I0|/4 for every split given.
double calibrate_exceptional_constant(const std::vector<const CollectionSplit*>& splits,
                                      const std::vector<const Signal*>& likes,
                                      const std::vector<DyadicInterval>& I0s);

struct Layers {
    std::vector<std::vector<std::size_t>> K;  // indices into CollectionSplit::items
    double u0 = 0;
    int length_violations = 0;  // J ∈ 𝓚_j with |J| < 2^j
};

/// Peels minimal elements of 𝓝♯ = {I ∈ 𝓝 : I ⊄ F_s}.
Layers generational_layers(const CollectionSplit& cs, const ExceptionalSet& F, const Signal& like, double C);

struct GramEntry {
    int j = 0, k = 0;  // layer indices, j > k, 1-based
    double value = 0, bound = 0, ratio = 0;
    bool far = false;  // j > k + k0
};

struct BesselResult {
    int layers = 0;
    double worst_norm = 0;  // max over c ∈ {−1,0,1}^L of ‖Σ c_j β_j‖₂
    double ratio = 0;       // worst_norm / (max(s,1) 2^{−s/2} |I0|^{1/2})
    bool exhaustive = false;
    double diag_sum = 0;     // Σ_j ‖β_j‖²
    double diag_direct = 0;  // Σ_J ‖T_J B‖²
    double diag_ratio = 0;   // diag_sum / (2^{−s}|I0|)
    double near_ratio = 0;   // max |⟨β_j,β_k⟩| / (2^{−s}|I0|) over k < j ≤ k + k0
    double far_worst = 0;    // max over far entries of |⟨β_j,β_k⟩| / (2^{−j}|I0|)
    double rm_ratio = 0;     // ‖max_n |Σ_{j≤n} β_j|‖₂ / (worst_norm log(2+L))
    std::vector<std::vector<double>> gram;
    std::vector<GramEntry> entries;
};

/// β_j = Σ_{J ∈ 𝓚_j} T_J B_{j(J)−s}.
BesselResult bessel_check(const CollectionSplit& cs, const Layers& layers, const Signal& like,
                          const DyadicInterval& I0, int k0, int trials, std::uint64_t seed);

struct NonStandardMaximal {
    double l2 = 0, l2_ratio = 0;              // over 𝓝, against 2^{−s/5}|I0|^{1/2}
    double l2_sharp = 0, l2_sharp_ratio = 0;  // over 𝓝♯
    double pairing = 0, pairing_ratio = 0;    // ⟨sup, g⟩ against |I0|⟨f⟩⟨g⟩
};

NonStandardMaximal nonstandard_maximal_check(const CollectionSplit& cs, const ExceptionalSet& F,
                                             const GoodBadSplit& split, const Signal& g);

struct StandardRow {
    int j = 0;
    double l2_sq = 0, l2_ratio = 0;  // ‖Σ_s T_{𝓢(j,s)} B_{j−s}‖₂² / (2^{−j/2}|I0|)
    double linf = 0, linf_ratio = 0;  // ‖·‖_∞ / sup_I ⟨f⟩_I
};

struct StandardResult {
    std::vector<StandardRow> rows;
    double l2_slope = 0;  // of log2 l2_sq against j, over rows with l2_sq > 0
    std::vector<std::pair<double, double>> q_ratios;  // (q, ‖sup‖_q / (q |I0|^{1/q}))
};

StandardResult standard_part_check(const std::vector<CollectionSplit>& splits, const GoodBadSplit& split,
                                   const std::vector<DyadicInterval>& family, const std::vector<double>& q_list);

struct GoodPartResult {
    std::vector<std::pair<double, double>> q_ratios;  // (q, ‖T_* γ‖_q / (q |I0|^{1/q}))
    double q_span = 1;
    std::vector<std::pair<int, double>> single_scale;  // (K, ‖T_{𝓘(K)}‖_{2→2})
    double single_scale_slope = 0;
};

/// With `single_scale`, also measures ‖T_{𝓘(K)}‖_{2→2} for each scale of the
/// family; that part depends only on the family, not on f.
GoodPartResult good_part_norm_check(const OperatorConfig& cfg, const GoodBadSplit& split,
                                    const std::vector<DyadicInterval>& family, const std::vector<double>& q_list,
                                    bool single_scale = true);

struct TraceOptions {
    double K = 10;
    std::vector<int> s_values{0, 1, 2, 3};
    std::vector<double> q_list{2, 4, 8};
    double c_same = 0;
    NonStandardTest test = NonStandardTest::Paired;
    int bessel_trials = 200;
    std::uint64_t seed = 1;
    double exceptional_C = 0;  // 0: calibrate on this trace alone
    bool good_part = true;
    bool single_scale = false;
};

struct TraceStep {
    int s = 0;
    std::size_t nonstandard = 0, standard = 0;
    int skipped = 0;
    double lower_constant = 0;
    double carleson = 0;
    double exceptional_fraction = 0, exceptional_threshold = 0;
    std::size_t layer_count = 0;
    double u0 = 0;
    int length_violations = 0;
    BesselResult bessel;
    NonStandardMaximal maximal;
};

struct TraceReport {
    BadPartReport bad;
    std::size_t bad_intervals = 0, family_size = 0;
    double exceptional_C = 0;
    std::vector<TraceStep> steps;
    StandardResult standard;
    GoodPartResult good;
};

TraceReport run_trace(const OperatorConfig& cfg, const Signal& f, const Signal& g, const DyadicInterval& I0,
                      const TraceOptions& opt);

nlohmann::json to_json(const TraceReport& r);

}  // namespace osclab
