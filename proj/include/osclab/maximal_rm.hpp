#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "osclab/core.hpp"

namespace osclab {

/// φ_1, …, φ_N on a common grid.
struct FunctionFamily {
    std::vector<Signal> phis;
    double A = 0;  // measured Bessel constant, filled by callers
    std::size_t size() const { return phis.size(); }
};

void check_family(const FunctionFamily& fam);

/// Gram matrix Re⟨φ_i, φ_j⟩. Coefficients are real, so only the real part matters.
std::vector<std::vector<double>> gram_matrix(const FunctionFamily& fam);

struct BesselConstant {
    double value = 0;
    bool exhaustive = false;
    std::vector<int> pattern;  // a maximizing c ∈ {−1,0,1}^N
};

/// max ‖Σ c_j φ_j‖₂ over c ∈ {−1,0,1}^N: every pattern when N ≤ 12, otherwise
/// all-ones, alternating, singletons and `trials` random patterns.
BesselConstant bessel_constant(const FunctionFamily& fam, int trials, std::uint64_t seed = 1);

/// Same maximum from a Gram matrix.
BesselConstant bessel_constant_gram(const std::vector<std::vector<double>>& G, int trials, std::uint64_t seed = 1);

/// max_n |Σ_{j≤n} φ_j| pointwise.
Signal rm_maximal(const FunctionFamily& fam);

/// Σ over levels ℓ of max over aligned blocks of length 2^ℓ of |block sum|.
/// Each partial sum is a sum of at most one block per level, so this dominates rm_maximal.
Signal chaining_maximal(const FunctionFamily& fam);

/// [1, n] as aligned dyadic blocks [a, b), coarsest first.
std::vector<std::pair<std::size_t, std::size_t>> dyadic_blocks(std::size_t n);

enum class RmGenerator { RandomSign, Lacunary, Constant };

RmGenerator parse_rm_generator(const std::string& name);
std::string to_string(RmGenerator g);

/// RandomSign: ±Walsh functions with distinct random indices.
/// Lacunary: √2 cos(2π n_j x), n_j geometric with ratio fixed by N and the grid.
/// Constant: φ_j = 1/N.
/// All live on [0, 1) with `cells` cells (a power of two).
FunctionFamily make_family(RmGenerator g, std::size_t N, std::size_t cells, std::uint64_t seed);

struct RmRow {
    std::size_t N = 0;
    double A = 0;
    bool exhaustive = false;
    double max_norm = 0;  // ‖rm_maximal‖₂
    double ratio = 0;     // max_norm / (A log(2+N))
    double chaining_norm = 0;
};

struct RmStudy {
    RmGenerator generator = RmGenerator::RandomSign;
    std::vector<RmRow> rows;
    double span = 1;  // max/min of the ratios
};

RmStudy rm_ratio_study(RmGenerator g, const std::vector<std::size_t>& N_list, std::size_t cells, int trials,
                       std::uint64_t seed);

nlohmann::json to_json(const RmStudy& s);

}  // namespace osclab
