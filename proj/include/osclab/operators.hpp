#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "osclab/dyadic.hpp"
#include "osclab/kernels.hpp"

namespace osclab {

/// Kernel family, grid family and budget, plus a cache of cell kernels.
/// Copies share the cache; cached kernels never change once built.
class OperatorConfig {
public:
    OperatorConfig(KernelFamily fam, GridFamily grid, std::uint64_t budget = 0);

    KernelFamily fam;
    GridFamily grid;
    std::uint64_t budget;

    const CellKernel& psi_kernel(int k, double step, Side side = Side::Positive) const;

private:
    struct Cache {
        std::mutex mu;
        std::map<std::tuple<int, double, int>, std::unique_ptr<CellKernel>> kernels;
    };
    std::shared_ptr<Cache> cache_;
};

/// Local output of one T_I: values for cells [first, first + values.size()).
struct Patch {
    std::ptrdiff_t first = 0;
    std::vector<cplx> values;
};

Patch T_I_patch(const OperatorConfig& cfg, const DyadicInterval& I, const Signal& g, Side side = Side::Positive);
/// T_I* h = 1_{I'} (κ̃ ∗ h), the ℓ² adjoint of T_I on the cell grid.
Patch T_I_adjoint_patch(const OperatorConfig& cfg, const DyadicInterval& I, const Signal& h);

Signal apply_T_I(const OperatorConfig& cfg, const DyadicInterval& I, const Signal& g);
Signal apply_T_collection(const OperatorConfig& cfg, const std::vector<DyadicInterval>& coll, const Signal& f,
                          Side side = Side::Positive);
Signal apply_T_star(const OperatorConfig& cfg, const std::vector<DyadicInterval>& coll, const Signal& f,
                    Side side = Side::Positive);

/// Partial sums by scale: result[K] = Σ_{I ∈ coll, I.k = K} T_I f.
std::map<int, Signal> T_by_scale(const OperatorConfig& cfg, const std::vector<DyadicInterval>& coll,
                                 const Signal& f, Side side = Side::Positive);
/// sup over l of |Σ_{K ≥ l} parts[K]|.
Signal maximal_truncation(const std::map<int, Signal>& parts, const Signal& like);

/// Intervals of one grid with scale in [fam.k0 + 2, grid.k_max] meeting the window.
std::vector<DyadicInterval> model_intervals(const OperatorConfig& cfg, int grid);

Signal apply_H_trunc(const OperatorConfig& cfg, const Signal& f, double eps);
Signal apply_H_star(const OperatorConfig& cfg, const Signal& f, const std::vector<double>& eps_set);
/// Dyadic truncation levels 2^m from the cell size up to the window width.
std::vector<double> default_eps_set(const Signal& f);

struct SmallScaleSplit {
    Signal cz_part;
    Signal hl_part_bound;
    double hl_constant = 0;
};

SmallScaleSplit small_scale_split(const OperatorConfig& cfg, const Signal& f);
/// Σ_{0 <= j <= k0} ∫ e(y^d) f(x−y) ρ_j(y) dy.
Signal middle_part(const OperatorConfig& cfg, const Signal& f);
/// L¹ norm of the least radially decreasing majorant of ρ.
double rho_majorant_l1(const BumpRho& rho);

struct Domination {
    double ratio = 0;   // max of H_* f / model
    double excess = 0;  // max of (H_* f − model) / M_HL f, floored at 0
    double worst_x = 0;  // location of ratio
};

/// Compares H_* f with Σ over grids and both kernel sides of T_*, plus the
/// small-scale parts.
Domination domination_check(const OperatorConfig& cfg, const Signal& f, const std::vector<double>& eps_set);

/// ‖T_𝓘‖_{2→2} by power iteration on T_𝓘* T_𝓘 with a fixed seed.
double collection_norm(const OperatorConfig& cfg, const std::vector<DyadicInterval>& coll, const Signal& like,
                       int iterations = 40);
/// ‖T_{𝓘(K)}‖_{2→2} for the scale-K intervals of one grid, by power iteration.
double single_scale_norm(const OperatorConfig& cfg, const Signal& like, int grid, int K, int iterations = 40);

}  // namespace osclab
