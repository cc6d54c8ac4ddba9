#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "osclab/operators.hpp"

namespace osclab {

/// One corpus entry. Unused fields are ignored by the generator.
struct GeneratorSpec {
    std::string generator;  // indicators | spikes | random_nonnegative | smooth_bumps | nested_bursts | csv
    int count = 1;
    std::vector<std::pair<double, double>> intervals;  // indicators: explicit [lo, hi)
    std::vector<std::int64_t> cells;                   // spikes: explicit cells
    double height = 1;
    double density = 1;  // random_nonnegative: fraction of nonzero cells
    int bumps = 3;       // smooth_bumps: bumps per signal
    std::string path;    // csv
};

/// 200 signals: nested bursts first, then indicators, spikes, random and smooth.
std::vector<GeneratorSpec> default_corpus();

struct KernelBoundsOptions {
    std::vector<int> degrees{2, 3};
    std::map<int, std::pair<int, int>> ranges{{2, {6, 12}}, {3, {4, 9}}};
    std::vector<std::pair<int, int>> cross_pairs{{1, 6}, {2, 7}, {1, 8}, {3, 8}, {2, 9}, {4, 9}};
    int partition_samples = 10000;
};

struct SparseBoundOptions {
    std::vector<double> r_values{1.05, 1.1, 1.25, 1.5, 2};
    int max_pairs = 200;
};

struct CzTraceOptions {
    double K = 10;
    std::vector<int> s_values{0, 1, 2, 3};
    int max_signals = 12;
    std::string test = "paired";
    int bessel_trials = 200;
};

struct RmCheckOptions {
    std::vector<std::string> generators{"random_sign", "lacunary", "constant"};
    std::vector<std::size_t> N{2, 4, 8, 12, 16, 32, 64, 128, 256};
    std::size_t cells = 4096;
    int trials = 200;
};

struct WeightsOptions {
    double p = 2;
    std::vector<double> strong_exponents{0, -0.5, -0.8, -0.9, -0.95, -0.97, -0.98, 0.5, 0.8, 0.9, 0.95, 0.97, 0.98};
    std::vector<double> weak_exponents{0, -0.5, -0.8, -0.9, -0.95, -0.97, -0.98};
    double x0 = -1;  // < 0: window center
    int max_signals = 6;
};

struct Manifest {
    int degree = 2;
    int window_log2 = 10;  // window [0, 2^window_log2)
    double step = 0.25;
    std::string k0_policy = "fixed";  // fixed | calibrate
    int k0 = 3;
    int k_min = 0, k_max = -1;  // k_max < 0: window_log2
    std::vector<GeneratorSpec> corpus = default_corpus();
    std::vector<std::string> suites;
    std::string output = "osclab-out";
    std::uint64_t seed = 1;
    int threads = 0;
    std::uint64_t budget = 0;  // 0: OSCLAB_BUDGET or the default

    KernelBoundsOptions kernel_bounds;
    SparseBoundOptions sparse_bound;
    CzTraceOptions cz_trace;
    RmCheckOptions rm_check;
    WeightsOptions weights;

    double window() const;
    int top_scale() const { return k_max < 0 ? window_log2 : k_max; }
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"kernel-bounds", "sparse-bound", "cz-trace", "rm-check", "weights"};
    return names;
}

/// Throws ConfigError with the dotted path of the offending field.
Manifest parse_manifest(const std::string& yaml_text);
Manifest load_manifest(const std::string& path);
void validate(const Manifest& m);

/// Deterministic, nonnegative signals on [0, 2^window_log2) with zero boundary cells.
std::vector<Signal> generate_corpus(const std::vector<GeneratorSpec>& spec, const Manifest& m, std::uint64_t seed);

/// Operator setup from the manifest (k0 from the policy).
OperatorConfig make_config(const Manifest& m, int degree);

enum class SuiteStatus { Pass, Fail, Skip };
std::string to_string(SuiteStatus s);

struct SuiteResult {
    SuiteStatus status = SuiteStatus::Pass;
    nlohmann::json constants = nlohmann::json::object();
    nlohmann::json tables = nlohmann::json::object();
    std::map<std::string, std::string> csv;  // file name → contents
    std::string reason;                      // for skips
};

SuiteResult run_kernel_bounds(const Manifest& m);
SuiteResult run_sparse_bound(const Manifest& m, const std::vector<Signal>& corpus);
SuiteResult run_cz_trace(const Manifest& m, const std::vector<Signal>& corpus);
SuiteResult run_rm_check(const Manifest& m);
SuiteResult run_weights(const Manifest& m, const std::vector<Signal>& corpus);

struct RunResult {
    nlohmann::json report;
    int exit_code = 0;  // 0 pass, 1 fail, 2 skip
    std::map<std::string, SuiteResult> suites;
};

/// Runs the selected suites; with `write`, creates the output directory and
/// writes report.json and the per-suite CSVs.
RunResult run_experiment(const Manifest& m, bool write = true);

}  // namespace osclab
