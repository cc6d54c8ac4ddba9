#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "osclab/core.hpp"

namespace osclab {

/// Smooth odd bump with ρ(t) = (χ(t) − χ(2t))/t.
///
/// χ is even, equal to 1 on [−1, 1] and to 0 outside [−5/4, 5/4], built from
/// the exp(−1/s) mollifier; so ρ is supported in 1/2 ≤ |t| ≤ 5/4 and ρ(1) = 1.
struct BumpRho {
    static constexpr double chi_flat = 1.0;
    static constexpr double chi_support = 1.25;
    double chi(double t) const;
    double theta(double t) const { return chi(t) - chi(2 * t); }
    double operator()(double t) const;
    double sup_norm() const;  // max |ρ|
    double l1_norm() const;   // ∫ |ρ|
};

/// Amplitude (χ(y/H) − χ(y/L))/y on y > 0, with χ(y/0) := 0 and χ(y/∞) := 1.
/// ρ_k is Band{2^{k−1}, 2^k}; the whole 1/y is Band{0, ∞}.
struct Band {
    double L = 0;
    double H = 0;  // H <= 0 encodes ∞
    double support_lo() const { return L; }
    double support_hi() const;  // +inf when H encodes ∞
    double operator()(double y) const;
    static Band rho(int k);
    static Band rho_range(int a, int b);  // Σ_{i=a}^{b} ρ_i
    static Band inverse() { return {0, 0}; }
};

struct KernelFamily {
    int d = 2;
    int k0 = 3;
    BumpRho rho;
    int oversampling = 8;
    void validate() const;
};

// e(t) = exp(2πi t).
cplx expi(long double frac);
// Fractional part of y^d, exact when y is a short dyadic rational.
long double frac_pow(double y, int d);

/// Sample budget: env OSCLAB_BUDGET or a default of 2^24 samples.
std::uint64_t sample_budget();

double rho_eval(const BumpRho& rho, double t);
double resolution_check(const BumpRho& rho, int M, const std::vector<double>& t_samples);

// ψ_k(y) = e(y^d) ρ_k(y) 1_{y>0}.
cplx psi_eval(const KernelFamily& fam, int k, double y);
double psi_sample_step(const KernelFamily& fam, int k);
Signal psi_sample(const KernelFamily& fam, int k);

/// Phase Σ sign·(u + shift)^d and amplitude scale·Π band(u + shift).
struct OscIntegrand {
    int d = 2;
    std::vector<std::pair<double, int>> phase;
    std::vector<std::pair<double, Band>> amp;
    double scale = 1;
};

struct QuadStats {
    std::uint64_t nodes = 0;
    int asymptotic = 0;
    int panels = 0;
};

/// ∫_a^b e(Φ(u)) A(u) du on a region where every band argument is positive.
/// Uses integration by parts when the phase is fast and the series converges
/// below `abs_tol`, otherwise Gauss-Legendre panels. Throws ResourceError when
/// more than `max_nodes` panel nodes would be needed.
cplx osc_integral(const OscIntegrand& g, double a, double b, int oversampling, double abs_tol,
                  std::uint64_t max_nodes, QuadStats* stats = nullptr);

/// Cell integrals κ[p] = ∫_{(p−½)h}^{(p+½)h} e(y^d) amp(y) dy for an odd
/// amplitude; entries with index p live at w[p − p_min].
struct CellKernel {
    std::ptrdiff_t p_min = 0;
    std::vector<cplx> w;
    double step = 1;
    std::ptrdiff_t p_max() const { return p_min + static_cast<std::ptrdiff_t>(w.size()) - 1; }
    cplx at(std::ptrdiff_t p) const {
        auto i = p - p_min;
        return (i < 0 || i >= static_cast<std::ptrdiff_t>(w.size())) ? cplx(0) : w[static_cast<std::size_t>(i)];
    }
    double l1() const;
};

enum class Side { Positive, Negative, Both };

/// Cell kernel of e(y^d) band(|y|) sign(y) restricted to `side` and to
/// eps < |y| <= y_cap.
CellKernel build_cell_kernel(int d, const Band& band, double step, Side side, double eps = 0,
                             int oversampling = 8, double y_cap = std::numeric_limits<double>::infinity());
/// Cell kernel of ψ_k on cells of width `step`.
CellKernel psi_cell_kernel(const KernelFamily& fam, int k, double step);

/// ψ̃_j ∗ ψ_k on [−2^{k+1}, 2^{k+1}]; sample m sits at x = m·h. FFT-based.
Signal correlate(const KernelFamily& fam, int j, int k);
/// ψ̃_j ∗ ψ_k(x) by direct quadrature.
cplx correlate_at(const KernelFamily& fam, int j, int k, double x, std::uint64_t max_nodes = 0,
                  QuadStats* stats = nullptr);
/// Roundoff level of correlate_at at scale pair (j, k).
double correlate_noise_floor(const KernelFamily& fam, int j, int k);

struct SameScaleRow {
    int k = 0;
    double sup_center = 0, sup_tail = 0, ratio_center = 0, ratio_tail = 0;
    double x_tail = 0;       // location of sup_tail
    double noise_floor = 0;  // roundoff level of the tail values
    bool at_noise_floor = false;
    std::string method;
    int points = 0, skipped = 0;
};

struct SameScaleResult {
    std::vector<SameScaleRow> rows;
    double slope_tail = 0;  // least-squares slope of log2 sup_tail vs k
    double span_tail = 0, span_center = 0;
    double c_same = 0;  // max over k of max(ratio_center, ratio_tail)
    bool pass = false;
};

SameScaleResult verify_same_scale(const KernelFamily& fam, int k_lo, int k_hi);

struct CrossScaleRow {
    int j = 0, k = 0;
    double sup_abs = 0, ratio = 0, x_at = 0, noise_floor = 0;
    int points = 0, skipped = 0;
};

struct CrossScaleResult {
    std::vector<CrossScaleRow> rows;
    double worst_ratio = 0;
    double bound = 0;  // 100 × same-scale constant used for pass
    bool pass = false;
};

CrossScaleResult verify_cross_scale(const KernelFamily& fam, const std::vector<std::pair<int, int>>& pairs,
                                    double c_same);

struct K0Calibration {
    int k0 = 3;
    bool calibrated = false;
    std::vector<CrossScaleRow> table;
};

/// Least k0 ≤ 8 for which all tested pairs with j < k − k0 have
/// ratio < 100 c_same.
K0Calibration calibrate_k0(const KernelFamily& fam, int k_max, double c_same);

void write_same_scale_csv(const SameScaleResult& r, const std::string& path);
void write_cross_scale_csv(const CrossScaleResult& r, const std::string& path);

}  // namespace osclab
