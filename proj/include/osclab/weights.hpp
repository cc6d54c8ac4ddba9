#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "osclab/operators.hpp"

namespace osclab {

struct Weight {
    Signal w;  // real, strictly positive
    std::string descriptor = "custom";
    double a = 0, x0 = 0;  // power weights |x − x0|^a
};

/// Throws DomainError unless every value is real, finite and > 0.
void check_weight(const Weight& w);

/// Cell averages of |x − x0|^a on the grid of `like`; a > −1.
Weight power_weight(const Signal& like, double x0, double a);
Weight constant_weight(const Signal& like, double c);

/// max over cells of M_HL w / w.
double a1_characteristic(const Weight& w);
/// max over cell intervals I of ⟨w⟩_I / min_I w.
double a1_characteristic_scan(const Weight& w);
/// max over cell intervals I of ⟨w⟩_I ⟨w^{1−p'}⟩_I^{p−1}.
double ap_characteristic(const Weight& w, double p);

/// max over f and λ of λ w({|H_* f| > λ}) / ‖f‖_{L¹(w)}, λ on 40 log-spaced
/// values across the positive range of |H_* f|.
double weighted_weak_norm(const OperatorConfig& cfg, const Weight& w, const std::vector<Signal>& corpus);
/// max over f of ‖H_* f‖_{L^p(w)} / ‖f‖_{L^p(w)}.
double weighted_strong_norm(const OperatorConfig& cfg, const Weight& w, double p, const std::vector<Signal>& corpus);

/// Same norms from precomputed H_* f.
double weighted_weak_norm(const Weight& w, const std::vector<Signal>& corpus, const std::vector<Signal>& Hf);
double weighted_strong_norm(const Weight& w, double p, const std::vector<Signal>& corpus,
                            const std::vector<Signal>& Hf);

enum class WeightedMode { Weak, Strong };

struct WeightRow {
    double a = 0;
    double characteristic = 0;
    double norm = 0;
};

struct WeightStudy {
    WeightedMode mode = WeightedMode::Strong;
    double p = 2;
    std::vector<WeightRow> rows;
    double slope = 0;        // least squares of log norm against log characteristic
    double predicted = 0;    // 2 for weak type, max(2/(p−1), p/(p−1)) otherwise
    double decades = 0;      // log10 of the characteristic span
    bool span_warning = false;  // fewer than 1.5 decades
    bool ok = false;         // slope ≤ predicted + 0.5
};

/// Power weights |x − x0|^a for each a. Weak mode uses [w]_{A₁} and needs a ≤ 0;
/// strong mode uses [w]_{A_p} and needs −1 < a < p − 1.
WeightStudy characteristic_scaling_study(const OperatorConfig& cfg, WeightedMode mode, double p, double x0,
                                         const std::vector<double>& exponents, const std::vector<Signal>& corpus);

nlohmann::json to_json(const WeightStudy& s);

}  // namespace osclab
