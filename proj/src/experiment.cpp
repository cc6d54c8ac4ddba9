#include "osclab/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "osclab/cz_trace.hpp"
#include "osclab/errors.hpp"
#include "osclab/maximal_rm.hpp"
#include "osclab/parallel.hpp"
#include "osclab/sparse.hpp"
#include "osclab/stats.hpp"
#include "osclab/weights.hpp"

namespace osclab {

std::vector<GeneratorSpec> default_corpus() {
    std::vector<GeneratorSpec> out;
    for (const auto& [name, count] : std::vector<std::pair<std::string, int>>{
             {"nested_bursts", 8}, {"indicators", 48}, {"spikes", 24}, {"random_nonnegative", 60}, {"smooth_bumps", 60}}) {
        GeneratorSpec g;
        g.generator = name;
        g.count = count;
        if (name == "random_nonnegative") g.density = 0.05;
        out.push_back(g);
    }
    return out;
}

double Manifest::window() const { return std::ldexp(1.0, window_log2); }

// ------------------------------------------------------------------ manifest

namespace {

template <class T>
const char* type_word() {
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::int64_t> || std::is_same_v<T, std::size_t> ||
                  std::is_same_v<T, std::uint64_t>)
        return "an integer";
    else if constexpr (std::is_same_v<T, double>)
        return "a number";
    else if constexpr (std::is_same_v<T, bool>)
        return "a boolean";
    else
        return "a string";
}

template <class T>
T scalar(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path, std::string("expected ") + type_word<T>());
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path, std::string("expected ") + type_word<T>() + ", got '" + n.Scalar() + "'");
    }
}

template <class T>
std::vector<T> scalar_list(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) throw ConfigError(path, "expected a list");
    std::vector<T> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(scalar<T>(n[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

template <class T>
std::pair<T, T> scalar_pair(const YAML::Node& n, const std::string& path) {
    auto v = scalar_list<T>(n, path);
    if (v.size() != 2) throw ConfigError(path, "expected two values");
    return {v[0], v[1]};
}

void check_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& known) {
    if (!n.IsMap()) throw ConfigError(path, "expected a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
    }
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

GeneratorSpec parse_generator(const YAML::Node& n, const std::string& path) {
    check_keys(n, path, {"generator", "count", "intervals", "cells", "height", "density", "bumps", "path"});
    GeneratorSpec g;
    if (!n["generator"]) throw ConfigError(join(path, "generator"), "missing");
    g.generator = scalar<std::string>(n["generator"], join(path, "generator"));
    static const std::set<std::string> known{"indicators",   "spikes",        "random_nonnegative",
                                             "smooth_bumps", "nested_bursts", "csv"};
    if (!known.count(g.generator)) throw ConfigError(join(path, "generator"), "unknown generator '" + g.generator + "'");
    if (n["count"]) g.count = scalar<int>(n["count"], join(path, "count"));
    if (g.count < 0) throw ConfigError(join(path, "count"), "must be >= 0");
    if (n["intervals"]) {
        const auto& iv = n["intervals"];
        if (!iv.IsSequence()) throw ConfigError(join(path, "intervals"), "expected a list");
        for (std::size_t i = 0; i < iv.size(); ++i)
            g.intervals.push_back(scalar_pair<double>(iv[i], join(path, "intervals") + "[" + std::to_string(i) + "]"));
    }
    if (n["cells"]) g.cells = scalar_list<std::int64_t>(n["cells"], join(path, "cells"));
    if (n["height"]) g.height = scalar<double>(n["height"], join(path, "height"));
    if (n["density"]) g.density = scalar<double>(n["density"], join(path, "density"));
    if (n["bumps"]) g.bumps = scalar<int>(n["bumps"], join(path, "bumps"));
    if (n["path"]) g.path = scalar<std::string>(n["path"], join(path, "path"));
    if (!(g.height > 0)) throw ConfigError(join(path, "height"), "must be positive");
    if (!(g.density > 0 && g.density <= 1)) throw ConfigError(join(path, "density"), "must lie in (0, 1]");
    if (g.bumps < 1) throw ConfigError(join(path, "bumps"), "must be >= 1");
    if (g.generator == "csv" && g.path.empty()) throw ConfigError(join(path, "path"), "required for csv");
    return g;
}

void parse_into(Manifest& m, const YAML::Node& root) {
    if (root.IsNull()) return;
    check_keys(root, "",
               {"degree", "window_log2", "step", "k0", "k0_policy", "scales", "corpus", "suites", "output", "seed",
                "threads", "budget", "kernel_bounds", "sparse_bound", "cz_trace", "rm_check", "weights"});
    if (root["degree"]) m.degree = scalar<int>(root["degree"], "degree");
    if (root["window_log2"]) m.window_log2 = scalar<int>(root["window_log2"], "window_log2");
    if (root["step"]) m.step = scalar<double>(root["step"], "step");
    if (root["k0"]) m.k0 = scalar<int>(root["k0"], "k0");
    if (root["k0_policy"]) m.k0_policy = scalar<std::string>(root["k0_policy"], "k0_policy");
    if (const auto s = root["scales"]) {
        check_keys(s, "scales", {"k_min", "k_max"});
        if (s["k_min"]) m.k_min = scalar<int>(s["k_min"], "scales.k_min");
        if (s["k_max"]) m.k_max = scalar<int>(s["k_max"], "scales.k_max");
    }
    if (const auto c = root["corpus"]) {
        if (!c.IsSequence()) throw ConfigError("corpus", "expected a list");
        m.corpus.clear();
        for (std::size_t i = 0; i < c.size(); ++i)
            m.corpus.push_back(parse_generator(c[i], "corpus[" + std::to_string(i) + "]"));
    }
    if (root["suites"]) m.suites = scalar_list<std::string>(root["suites"], "suites");
    if (root["output"]) m.output = scalar<std::string>(root["output"], "output");
    if (root["seed"]) m.seed = scalar<std::uint64_t>(root["seed"], "seed");
    if (root["threads"]) m.threads = scalar<int>(root["threads"], "threads");
    if (root["budget"]) m.budget = scalar<std::uint64_t>(root["budget"], "budget");
    if (const auto n = root["kernel_bounds"]) {
        auto& o = m.kernel_bounds;
        check_keys(n, "kernel_bounds", {"degrees", "ranges", "cross_pairs", "partition_samples"});
        if (n["degrees"]) o.degrees = scalar_list<int>(n["degrees"], "kernel_bounds.degrees");
        if (const auto r = n["ranges"]) {
            if (!r.IsMap()) throw ConfigError("kernel_bounds.ranges", "expected a mapping");
            o.ranges.clear();
            for (const auto& kv : r) {
                const std::string p = "kernel_bounds.ranges." + kv.first.as<std::string>();
                o.ranges[scalar<int>(kv.first, p)] = scalar_pair<int>(kv.second, p);
            }
        }
        if (const auto cp = n["cross_pairs"]) {
            if (!cp.IsSequence()) throw ConfigError("kernel_bounds.cross_pairs", "expected a list");
            o.cross_pairs.clear();
            for (std::size_t i = 0; i < cp.size(); ++i)
                o.cross_pairs.push_back(
                    scalar_pair<int>(cp[i], "kernel_bounds.cross_pairs[" + std::to_string(i) + "]"));
        }
        if (n["partition_samples"])
            o.partition_samples = scalar<int>(n["partition_samples"], "kernel_bounds.partition_samples");
    }
    if (const auto n = root["sparse_bound"]) {
        check_keys(n, "sparse_bound", {"r_values", "max_pairs"});
        if (n["r_values"]) m.sparse_bound.r_values = scalar_list<double>(n["r_values"], "sparse_bound.r_values");
        if (n["max_pairs"]) m.sparse_bound.max_pairs = scalar<int>(n["max_pairs"], "sparse_bound.max_pairs");
    }
    if (const auto n = root["cz_trace"]) {
        auto& o = m.cz_trace;
        check_keys(n, "cz_trace", {"K", "s_values", "max_signals", "test", "bessel_trials"});
        if (n["K"]) o.K = scalar<double>(n["K"], "cz_trace.K");
        if (n["s_values"]) o.s_values = scalar_list<int>(n["s_values"], "cz_trace.s_values");
        if (n["max_signals"]) o.max_signals = scalar<int>(n["max_signals"], "cz_trace.max_signals");
        if (n["test"]) o.test = scalar<std::string>(n["test"], "cz_trace.test");
        if (n["bessel_trials"]) o.bessel_trials = scalar<int>(n["bessel_trials"], "cz_trace.bessel_trials");
    }
    if (const auto n = root["rm_check"]) {
        auto& o = m.rm_check;
        check_keys(n, "rm_check", {"generators", "N", "cells", "trials"});
        if (n["generators"]) o.generators = scalar_list<std::string>(n["generators"], "rm_check.generators");
        if (n["N"]) o.N = scalar_list<std::size_t>(n["N"], "rm_check.N");
        if (n["cells"]) o.cells = scalar<std::size_t>(n["cells"], "rm_check.cells");
        if (n["trials"]) o.trials = scalar<int>(n["trials"], "rm_check.trials");
    }
    if (const auto n = root["weights"]) {
        auto& o = m.weights;
        check_keys(n, "weights", {"p", "strong_exponents", "weak_exponents", "x0", "max_signals"});
        if (n["p"]) o.p = scalar<double>(n["p"], "weights.p");
        if (n["strong_exponents"])
            o.strong_exponents = scalar_list<double>(n["strong_exponents"], "weights.strong_exponents");
        if (n["weak_exponents"]) o.weak_exponents = scalar_list<double>(n["weak_exponents"], "weights.weak_exponents");
        if (n["x0"]) o.x0 = scalar<double>(n["x0"], "weights.x0");
        if (n["max_signals"]) o.max_signals = scalar<int>(n["max_signals"], "weights.max_signals");
    }
}

}  // namespace

void validate(const Manifest& m) {
    if (m.degree < 2) throw ConfigError("degree", "must be >= 2");
    if (m.window_log2 < 6 || m.window_log2 > 20) throw ConfigError("window_log2", "must lie in [6, 20]");
    if (!(m.step > 0) || std::exp2(std::round(std::log2(m.step))) != m.step)
        throw ConfigError("step", "must be a positive power of two");
    if (m.window() / m.step < 16) throw ConfigError("step", "window must hold at least 16 cells");
    if (m.k0_policy != "fixed" && m.k0_policy != "calibrate")
        throw ConfigError("k0_policy", "expected 'fixed' or 'calibrate'");
    if (m.k0 < 0 || m.k0 > 8) throw ConfigError("k0", "must lie in [0, 8]");
    if (m.k_min < 0) throw ConfigError("scales.k_min", "must be >= 0");
    if (m.top_scale() > m.window_log2) throw ConfigError("scales.k_max", "must not exceed window_log2");
    if (m.top_scale() < m.k0 + 2) throw ConfigError("scales.k_max", "must be at least k0 + 2");
    if (m.k_min > m.top_scale()) throw ConfigError("scales.k_min", "must not exceed k_max");
    if (m.threads < 0) throw ConfigError("threads", "must be >= 0");
    const auto& names = suite_names();
    for (std::size_t i = 0; i < m.suites.size(); ++i)
        if (std::find(names.begin(), names.end(), m.suites[i]) == names.end())
            throw ConfigError("suites[" + std::to_string(i) + "]", "unknown suite '" + m.suites[i] + "'");
    for (std::size_t i = 0; i < m.kernel_bounds.degrees.size(); ++i) {
        const int d = m.kernel_bounds.degrees[i];
        if (d < 2) throw ConfigError("kernel_bounds.degrees[" + std::to_string(i) + "]", "must be >= 2");
        if (!m.kernel_bounds.ranges.count(d))
            throw ConfigError("kernel_bounds.ranges", "no scale range for degree " + std::to_string(d));
    }
    for (const auto& [d, r] : m.kernel_bounds.ranges)
        if (r.first > r.second) throw ConfigError("kernel_bounds.ranges." + std::to_string(d), "empty range");
    if (m.kernel_bounds.partition_samples < 1) throw ConfigError("kernel_bounds.partition_samples", "must be >= 1");
    for (std::size_t i = 0; i < m.sparse_bound.r_values.size(); ++i) {
        const double r = m.sparse_bound.r_values[i];
        if (!(r > 1 && r <= 2)) throw ConfigError("sparse_bound.r_values[" + std::to_string(i) + "]", "must lie in (1, 2]");
    }
    if (m.sparse_bound.max_pairs < 1) throw ConfigError("sparse_bound.max_pairs", "must be >= 1");
    if (!(m.cz_trace.K > 4)) throw ConfigError("cz_trace.K", "must exceed 4");
    for (std::size_t i = 0; i < m.cz_trace.s_values.size(); ++i)
        if (m.cz_trace.s_values[i] < 0) throw ConfigError("cz_trace.s_values[" + std::to_string(i) + "]", "must be >= 0");
    if (m.cz_trace.test != "paired" && m.cz_trace.test != "pointwise")
        throw ConfigError("cz_trace.test", "expected 'paired' or 'pointwise'");
    if (m.cz_trace.max_signals < 1) throw ConfigError("cz_trace.max_signals", "must be >= 1");
    if (m.cz_trace.bessel_trials < 1) throw ConfigError("cz_trace.bessel_trials", "must be >= 1");
    for (std::size_t i = 0; i < m.rm_check.generators.size(); ++i) {
        try {
            parse_rm_generator(m.rm_check.generators[i]);
        } catch (const ConfigError& e) {
            throw ConfigError("rm_check.generators[" + std::to_string(i) + "]", e.what());
        }
    }
    const auto cells = m.rm_check.cells;
    if (cells < 16 || (cells & (cells - 1))) throw ConfigError("rm_check.cells", "must be a power of two >= 16");
    for (std::size_t i = 0; i < m.rm_check.N.size(); ++i)
        if (m.rm_check.N[i] < 1 || 2 * m.rm_check.N[i] + 2 > cells)
            throw ConfigError("rm_check.N[" + std::to_string(i) + "]", "must lie in [1, cells/2 - 1)");
    if (m.rm_check.trials < 1) throw ConfigError("rm_check.trials", "must be >= 1");
    if (!(m.weights.p > 1)) throw ConfigError("weights.p", "must exceed 1");
    for (std::size_t i = 0; i < m.weights.strong_exponents.size(); ++i) {
        const double a = m.weights.strong_exponents[i];
        if (!(a > -1 && a < m.weights.p - 1))
            throw ConfigError("weights.strong_exponents[" + std::to_string(i) + "]", "must lie in (-1, p-1)");
    }
    for (std::size_t i = 0; i < m.weights.weak_exponents.size(); ++i) {
        const double a = m.weights.weak_exponents[i];
        if (!(a > -1 && a <= 0)) throw ConfigError("weights.weak_exponents[" + std::to_string(i) + "]", "must lie in (-1, 0]");
    }
    if (m.weights.x0 >= m.window()) throw ConfigError("weights.x0", "must lie in the window");
    if (m.weights.max_signals < 0) throw ConfigError("weights.max_signals", "must be >= 0");
}

Manifest parse_manifest(const std::string& yaml_text) {
    Manifest m;
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError("", std::string("malformed manifest: ") + e.what());
    }
    parse_into(m, root);
    validate(m);
    return m;
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read manifest " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

// ------------------------------------------------------------------ corpus

namespace {

Signal blank(const Manifest& m) { return Signal(0, m.window(), m.step); }

void nested_bursts(Signal& f, bool right, double min_len, double height) {
    const double W = f.hi() - f.lo();
    double lo = right ? W / 2 : 0, len = W / 2;
    while (len >= min_len) {
        const Interval burst{lo + 0.375 * len, lo + 0.5 * len};
        const CellRange c = cell_range(f, burst);
        for (auto n = c.first; n < c.last; ++n) f[static_cast<std::size_t>(n)] += height;
        lo += len / 2;
        len /= 4;
    }
}

}  // namespace

std::vector<Signal> generate_corpus(const std::vector<GeneratorSpec>& spec, const Manifest& m, std::uint64_t seed) {
    std::vector<Signal> out;
    const double W = m.window(), h = m.step;
    const auto N = static_cast<std::int64_t>(std::llround(W / h));
    for (std::size_t e = 0; e < spec.size(); ++e) {
        const auto& g = spec[e];
        const std::string path = "corpus[" + std::to_string(e) + "]";
        std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(e)};
        std::mt19937_64 rng(ss);
        std::uniform_real_distribution<double> U(0, 1);
        if (g.generator == "csv") {
            Signal s;
            try {
                s = read_csv(g.path);
            } catch (const std::exception& ex) {
                throw ConfigError(path + ".path", ex.what());
            }
            if (!s.same_grid(blank(m))) throw ConfigError(path + ".path", "grid differs from the manifest window/step");
            for (auto& v : s.values())
                if (v.real() < 0 || v.imag() != 0) throw ConfigError(path + ".path", "values must be real and >= 0");
            out.push_back(std::move(s));
            continue;
        }
        if (g.generator == "indicators" && !g.intervals.empty()) {
            for (std::size_t i = 0; i < g.intervals.size(); ++i) {
                const auto [lo, hi] = g.intervals[i];
                const std::string p = path + ".intervals[" + std::to_string(i) + "]";
                if (!(lo < hi)) throw ConfigError(p, "needs lo < hi");
                if (lo < h || hi > W - h) throw ConfigError(p, "must leave the boundary cells empty");
                Signal s = blank(m);
                const CellRange c = cell_range(s, Interval{lo, hi});
                for (auto n = c.first; n < c.last; ++n) s[static_cast<std::size_t>(n)] = g.height;
                out.push_back(std::move(s));
            }
            continue;
        }
        if (g.generator == "spikes" && !g.cells.empty()) {
            for (std::size_t i = 0; i < g.cells.size(); ++i) {
                const auto c = g.cells[i];
                if (c < 1 || c > N - 2)
                    throw ConfigError(path + ".cells[" + std::to_string(i) + "]", "must be an interior cell");
                Signal s = blank(m);
                s[static_cast<std::size_t>(c)] = g.height;
                out.push_back(std::move(s));
            }
            continue;
        }
        for (int i = 0; i < g.count; ++i) {
            Signal s = blank(m);
            if (g.generator == "indicators") {
                const double len = std::max(2 * h, std::ldexp(W, -static_cast<int>(2 + U(rng) * (m.window_log2 - 2))));
                const double lo = h + U(rng) * (W - 2 * h - len);
                const CellRange c = cell_range(s, Interval{lo, lo + len});
                for (auto n = c.first; n < c.last; ++n) s[static_cast<std::size_t>(n)] = g.height;
            } else if (g.generator == "spikes") {
                const auto c = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(N - 2));
                s[static_cast<std::size_t>(c)] = g.height;
            } else if (g.generator == "random_nonnegative") {
                for (std::int64_t n = 1; n < N - 1; ++n) {
                    const double keep = U(rng), v = U(rng);
                    if (keep < g.density) s[static_cast<std::size_t>(n)] = g.height * v;
                }
            } else if (g.generator == "smooth_bumps") {
                const BumpRho rho;
                for (int b = 0; b < g.bumps; ++b) {
                    const double w = std::ldexp(1.0, static_cast<int>(1 + U(rng) * (m.window_log2 - 5)));
                    const double c = 2 * w + U(rng) * (W - 4 * w);
                    const double a = g.height * (0.5 + 1.5 * U(rng));
                    for (std::size_t n = 1; n + 1 < s.size(); ++n)
                        s[n] += a * rho.chi((s.x(static_cast<std::ptrdiff_t>(n)) - c) / w);
                }
            } else if (g.generator == "nested_bursts") {
                const double min_len = std::ldexp(1.0, 5 + (i / 2) % 3);
                nested_bursts(s, i % 2 == 1, min_len, g.height * (1 + U(rng)));
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

OperatorConfig make_config(const Manifest& m, int degree) {
    KernelFamily fam;
    fam.d = degree;
    fam.k0 = m.k0;
    if (m.k0_policy == "calibrate") {
        const int k = fam.k0 + 2;
        const double c_same = std::abs(correlate_at(fam, k, k, 0.0, 0)) * std::ldexp(1.0, k);
        fam.k0 = calibrate_k0(fam, std::min(m.top_scale(), 9), c_same).k0;
    }
    const std::uint64_t budget = std::getenv("OSCLAB_BUDGET") ? sample_budget() : (m.budget ? m.budget : sample_budget());
    return OperatorConfig(fam, GridFamily{Interval{0, m.window()}, m.k_min, m.top_scale()}, budget);
}

std::string to_string(SuiteStatus s) {
    switch (s) {
        case SuiteStatus::Pass: return "pass";
        case SuiteStatus::Fail: return "fail";
        case SuiteStatus::Skip: return "skip";
    }
    return "?";
}

// ------------------------------------------------------------------ suites

namespace {

class Csv {
public:
    explicit Csv(const std::string& header) { os_ << std::setprecision(12) << header << '\n'; }
    template <class... T>
    void row(const T&... v) {
        bool first = true;
        ((os_ << (first ? "" : ",") << v, first = false), ...);
        os_ << '\n';
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

double same_scale_constant(const KernelFamily& fam) {
    const int k = fam.k0 + 2;
    return std::abs(correlate_at(fam, k, k, 0.0, 0)) * std::ldexp(1.0, k);
}

std::vector<double> resolution_samples() {
    std::vector<double> t;
    for (int i = 0; i <= 1000; ++i) {
        const double a = std::exp2(-8 + 16.0 * i / 1000);
        t.push_back(a);
        t.push_back(-a);
    }
    return t;
}

bool finite_all(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_budget(std::uint64_t need, std::uint64_t budget, const std::string& what) {
    if (need > budget) throw ResourceError(what, need, budget);
}

}  // namespace

SuiteResult run_kernel_bounds(const Manifest& m) {
    SuiteResult out;
    bool pass = true;
    const auto& o = m.kernel_bounds;
    Csv same_csv("d,k,sup_center,sup_tail,ratio_center,ratio_tail,x_tail,noise_floor,at_noise_floor,method");
    Csv cross_csv("d,j,k,sup_abs,ratio,x_at,noise_floor");
    for (int d : o.degrees) {
        const OperatorConfig cfg = make_config(m, d);
        const KernelFamily& fam = cfg.fam;
        const std::string key = "d" + std::to_string(d);
        nlohmann::json c;
        const double res = resolution_check(fam.rho, 12, resolution_samples());
        c["resolution_error"] = res;
        const auto [lo, hi] = o.ranges.at(d);
        const auto same = verify_same_scale(fam, lo, hi);
        c["k0"] = fam.k0;
        c["slope_tail"] = same.slope_tail;
        c["span_tail"] = same.span_tail;
        c["span_center"] = same.span_center;
        c["c_same"] = same.c_same;
        const bool same_ok = same.pass && same.slope_tail <= -2 + 0.3;
        c["same_scale_pass"] = same_ok;
        for (const auto& r : same.rows)
            same_csv.row(d, r.k, r.sup_center, r.sup_tail, r.ratio_center, r.ratio_tail, r.x_tail, r.noise_floor,
                         r.at_noise_floor ? 1 : 0, r.method);
        std::vector<std::pair<int, int>> pairs;
        for (const auto& p : o.cross_pairs)
            if (p.first < p.second - fam.k0) pairs.push_back(p);
        const auto cross = verify_cross_scale(fam, pairs, same.c_same);
        const bool cross_ok = cross.pass && cross.rows.size() >= 6;
        c["cross_pairs"] = cross.rows.size();
        c["cross_worst_ratio"] = cross.worst_ratio;
        c["cross_bound"] = cross.bound;
        c["cross_scale_pass"] = cross_ok;
        for (const auto& r : cross.rows) cross_csv.row(d, r.j, r.k, r.sup_abs, r.ratio, r.x_at, r.noise_floor);
        std::mt19937_64 rng(m.seed + static_cast<std::uint64_t>(d));
        std::uniform_real_distribution<double> U(0, m.window());
        int violations = 0;
        for (int k = m.k_min; k <= m.top_scale(); ++k) {
            std::vector<double> xs(static_cast<std::size_t>(o.partition_samples));
            for (auto& x : xs) x = U(rng);
            violations += partition_violations(k, xs);
        }
        c["partition_violations"] = violations;
        c["resolution_pass"] = res < 1e-8;
        pass = pass && res < 1e-8 && same_ok && cross_ok && violations == 0;
        out.constants[key] = c;
        nlohmann::json srows = nlohmann::json::array(), crows = nlohmann::json::array();
        for (const auto& r : same.rows)
            srows.push_back({{"k", r.k}, {"ratio_center", r.ratio_center}, {"ratio_tail", r.ratio_tail},
                             {"sup_tail", r.sup_tail}, {"at_noise_floor", r.at_noise_floor}});
        for (const auto& r : cross.rows) crows.push_back({{"j", r.j}, {"k", r.k}, {"ratio", r.ratio}});
        out.tables[key] = {{"same_scale", srows}, {"cross_scale", crows}};
    }
    out.csv["same_scale"] = same_csv.str();
    out.csv["cross_scale"] = cross_csv.str();
    out.status = pass ? SuiteStatus::Pass : SuiteStatus::Fail;
    return out;
}

SuiteResult run_sparse_bound(const Manifest& m, const std::vector<Signal>& corpus) {
    SuiteResult out;
    if (corpus.empty()) throw ConfigError("corpus", "sparse-bound needs a nonempty corpus");
    const OperatorConfig cfg = make_config(m, m.degree);
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(m.sparse_bound.max_pairs), corpus.size());
    std::vector<SignalPair> pairs;
    for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(corpus[i], corpus[(i + 1) % corpus.size()]);
    const DyadicInterval I0{1, m.window_log2, 0};
    const auto study = sparse_scaling_study(cfg, pairs, I0, m.sparse_bound.r_values);
    // Witness properties do not depend on r.
    std::size_t built = 0, valid = 0;
    double worst_union = 0, min_eta = 1;
    for (const auto& row : study.front().table) {
        if (row.skipped) continue;
        ++built;
        if (row.sparse && row.union_fraction <= 0.21) ++valid;
        worst_union = std::max(worst_union, row.union_fraction);
        min_eta = std::min(min_eta, row.eta);
    }
    std::vector<double> scaled;
    nlohmann::json srows = nlohmann::json::array();
    Csv csv("r,pair,skipped,pairing,form,ratio,eta,union_fraction,sparse");
    for (const auto& sc : study) {
        const double v = sc.worst_ratio * (sc.r - 1);
        scaled.push_back(v);
        srows.push_back({{"r", sc.r}, {"worst_ratio", sc.worst_ratio}, {"scaled", v}});
        for (const auto& row : sc.table)
            csv.row(sc.r, row.pair, row.skipped ? 1 : 0, row.pairing, row.form, row.ratio, row.eta, row.union_fraction,
                    row.sparse ? 1 : 0);
    }
    const double span = positive_span(scaled);
    const bool witnesses_ok = built > 0 && valid == built;
    const bool scaling_ok = finite_all(scaled) &&
                            std::all_of(scaled.begin(), scaled.end(), [](double v) { return v > 0; }) && span < 10;
    out.constants = {{"pairs", n},
                     {"witnesses_built", built},
                     {"witnesses_valid", valid},
                     {"worst_union_fraction", worst_union},
                     {"min_eta", min_eta},
                     {"scaled_span", span},
                     {"witness_pass", witnesses_ok},
                     {"scaling_pass", scaling_ok}};
    out.tables["scaling"] = srows;
    out.csv["sparse_constants"] = csv.str();
    out.status = witnesses_ok && scaling_ok ? SuiteStatus::Pass : SuiteStatus::Fail;
    return out;
}

SuiteResult run_cz_trace(const Manifest& m, const std::vector<Signal>& corpus) {
    SuiteResult out;
    if (corpus.empty()) throw ConfigError("corpus", "cz-trace needs a nonempty corpus");
    const OperatorConfig cfg = make_config(m, m.degree);
    const auto& o = m.cz_trace;
    TraceOptions opt;
    opt.K = o.K;
    opt.s_values = o.s_values;
    opt.c_same = same_scale_constant(cfg.fam);
    opt.test = o.test == "pointwise" ? NonStandardTest::Pointwise : NonStandardTest::Paired;
    opt.bessel_trials = o.bessel_trials;
    opt.seed = m.seed;
    const DyadicInterval I0{1, m.window_log2, 0};
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(o.max_signals), corpus.size());
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < n; ++i) {
        const CellRange c = cells(corpus[i], I0);
        double mass = 0;
        for (auto p = c.first; p < c.last; ++p) mass += std::abs(corpus[i][static_cast<std::size_t>(p)]);
        if (mass > 0) used.push_back(i);
    }
    const auto reports = parallel_map(used.size(), [&](std::size_t t) {
        const std::size_t i = used[t];
        return run_trace(cfg, corpus[i], corpus[(i + 1) % corpus.size()], I0, opt);
    });
    double recon = 0, bsum = 0, bi_span = 1, fraction = 0;
    std::map<int, double> carleson, bessel;
    std::vector<double> far;
    Csv csv("signal,s,nonstandard,standard,carleson,exceptional_fraction,layers,bessel_ratio,far_worst");
    nlohmann::json traces = nlohmann::json::array();
    for (std::size_t t = 0; t < reports.size(); ++t) {
        const auto& r = reports[t];
        recon = std::max(recon, r.bad.reconstruction_error);
        bsum = std::max(bsum, r.bad.bsum);
        std::vector<double> bi;
        for (const auto& [k, v] : r.bad.bi_ratio) bi.push_back(v);
        bi_span = std::max(bi_span, positive_span(bi));
        for (const auto& st : r.steps) {
            carleson[st.s] = std::max(carleson[st.s], st.carleson);
            bessel[st.s] = std::max(bessel[st.s], st.bessel.ratio);
            fraction = std::max(fraction, st.exceptional_fraction);
            for (const auto& e : st.bessel.entries)
                if (e.far && std::abs(e.value) > 1e-9 * st.bessel.diag_sum) far.push_back(e.ratio);
            csv.row(used[t], st.s, st.nonstandard, st.standard, st.carleson, st.exceptional_fraction, st.layer_count,
                    st.bessel.ratio, st.bessel.far_worst);
        }
        nlohmann::json j = to_json(r);
        j["signal"] = used[t];
        traces.push_back(j);
    }
    std::vector<double> cv, bv;
    for (const auto& [s, v] : carleson) cv.push_back(v);
    for (const auto& [s, v] : bessel) bv.push_back(v);
    int far_count = 0;
    const double far_span = positive_span(far, &far_count);
    nlohmann::json checks = {{"a_reconstruction", recon <= 1e-12},
                             {"b_bsum", bsum <= 1 + 1e-12},
                             {"c_bi_uniform", bi_span <= 20},
                             {"d_carleson_uniform", positive_span(cv) <= 10},
                             {"e_exceptional", fraction <= 0.25},
                             {"f_bessel_uniform", positive_span(bv) <= 10},
                             {"g_far_gram", far_count >= 1 && far_span <= 20}};
    bool pass = !reports.empty();
    for (const auto& [k, v] : checks.items()) pass = pass && v.get<bool>();
    out.constants = {{"signals", reports.size()},
                     {"c_same", opt.c_same},
                     {"reconstruction_error", recon},
                     {"bsum", bsum},
                     {"bi_span", bi_span},
                     {"carleson_span", positive_span(cv)},
                     {"exceptional_fraction", fraction},
                     {"bessel_span", positive_span(bv)},
                     {"far_entries", far_count},
                     {"far_span", far_span},
                     {"checks", checks}};
    nlohmann::json per_s = nlohmann::json::array();
    for (const auto& [s, v] : carleson) per_s.push_back({{"s", s}, {"carleson", v}, {"bessel", bessel[s]}});
    out.tables = {{"per_s", per_s}, {"traces", traces}};
    out.csv["trace_steps"] = csv.str();
    out.status = pass ? SuiteStatus::Pass : SuiteStatus::Fail;
    return out;
}

SuiteResult run_rm_check(const Manifest& m) {
    SuiteResult out;
    const auto& o = m.rm_check;
    std::uint64_t need = 0;
    for (auto N : o.N) need += N * o.cells;
    check_budget(need, make_config(m, m.degree).budget, "rm-check");
    bool pass = true;
    Csv csv("generator,N,A,exhaustive,max_norm,chaining_norm,ratio");
    for (const auto& name : o.generators) {
        const RmGenerator g = parse_rm_generator(name);
        const auto st = rm_ratio_study(g, o.N, o.cells, o.trials, m.seed);
        bool exact = true;
        for (const auto& r : st.rows) {
            csv.row(name, r.N, r.A, r.exhaustive ? 1 : 0, r.max_norm, r.chaining_norm, r.ratio);
            if (r.N > 12) continue;
            const double want = g == RmGenerator::Constant ? 1.0 : std::sqrt(static_cast<double>(r.N));
            exact = exact && r.exhaustive && std::abs(r.A - want) <= 1e-8 * want;
        }
        const bool ok = st.span < 5 && exact;
        pass = pass && ok;
        out.constants[name] = {{"span", st.span}, {"exhaustive_exact", exact}, {"pass", ok}};
        out.tables[name] = to_json(st)["rows"];
    }
    out.csv["rm_ratios"] = csv.str();
    out.status = pass ? SuiteStatus::Pass : SuiteStatus::Fail;
    return out;
}

SuiteResult run_weights(const Manifest& m, const std::vector<Signal>& corpus) {
    SuiteResult out;
    const OperatorConfig cfg = make_config(m, m.degree);
    const auto N = static_cast<std::uint64_t>(m.window() / m.step);
    check_budget(N * (N + 1) / 2, cfg.budget, "weights interval scan");
    const auto& o = m.weights;
    const double W = m.window();
    const double x0 = o.x0 < 0 ? W / 2 : o.x0;
    std::vector<Signal> fs;
    for (std::size_t i = 0; i < corpus.size() && fs.size() < static_cast<std::size_t>(o.max_signals); ++i)
        fs.push_back(corpus[i]);
    // Probes on either side of the singularity.
    const Signal like(0, W, m.step);
    for (const Interval I : {Interval{x0, std::min(W - m.step, x0 + W / 16)},
                             Interval{std::max(m.step, x0 - W / 64), x0}}) {
        Signal s = Signal::zeros_like(like);
        const CellRange c = cell_range(s, I);
        for (auto n = c.first; n < c.last; ++n) s[static_cast<std::size_t>(n)] = 1;
        fs.push_back(std::move(s));
    }
    const auto strong = characteristic_scaling_study(cfg, WeightedMode::Strong, o.p, x0, o.strong_exponents, fs);
    const auto weak = characteristic_scaling_study(cfg, WeightedMode::Weak, 1, x0, o.weak_exponents, fs);
    Csv csv("mode,p,a,characteristic,norm");
    for (const auto* st : {&strong, &weak})
        for (const auto& r : st->rows)
            csv.row(st->mode == WeightedMode::Weak ? "weak" : "strong", st->p, r.a, r.characteristic, r.norm);
    const bool ok_strong = strong.ok && !strong.span_warning;
    const bool ok_weak = weak.ok && !weak.span_warning;
    out.constants = {{"strong", {{"slope", strong.slope}, {"predicted", strong.predicted}, {"decades", strong.decades},
                                 {"span_warning", strong.span_warning}, {"pass", ok_strong}}},
                     {"weak", {{"slope", weak.slope}, {"predicted", weak.predicted}, {"decades", weak.decades},
                               {"span_warning", weak.span_warning}, {"pass", ok_weak}}},
                     {"x0", x0},
                     {"signals", fs.size()}};
    out.tables = {{"strong", to_json(strong)["rows"]}, {"weak", to_json(weak)["rows"]}};
    out.csv["weights"] = csv.str();
    out.status = ok_strong && ok_weak ? SuiteStatus::Pass : SuiteStatus::Fail;
    return out;
}

RunResult run_experiment(const Manifest& m, bool write) {
    validate(m);
    set_thread_count(m.threads);
    RunResult rr;
    rr.report = nlohmann::json::object();
    std::vector<std::string> order;
    for (const auto& s : m.suites)
        if (std::find(order.begin(), order.end(), s) == order.end()) order.push_back(s);
    const bool needs_corpus = std::any_of(order.begin(), order.end(), [](const std::string& s) {
        return s == "sparse-bound" || s == "cz-trace" || s == "weights";
    });
    std::vector<Signal> corpus;
    if (needs_corpus) corpus = generate_corpus(m.corpus, m, m.seed);
    bool any_fail = false, any_skip = false;
    for (const auto& name : order) {
        SuiteResult r;
        try {
            if (name == "kernel-bounds") r = run_kernel_bounds(m);
            else if (name == "sparse-bound") r = run_sparse_bound(m, corpus);
            else if (name == "cz-trace") r = run_cz_trace(m, corpus);
            else if (name == "rm-check") r = run_rm_check(m);
            else r = run_weights(m, corpus);
        } catch (const ResourceError& e) {
            r = SuiteResult{};
            r.status = SuiteStatus::Skip;
            r.reason = e.what();
        }
        any_fail = any_fail || r.status == SuiteStatus::Fail;
        any_skip = any_skip || r.status == SuiteStatus::Skip;
        nlohmann::json j = {{"pass", r.status == SuiteStatus::Pass},
                            {"status", to_string(r.status)},
                            {"constants", r.constants},
                            {"tables", r.tables}};
        if (!r.reason.empty()) j["reason"] = r.reason;
        rr.report[name] = j;
        rr.suites[name] = std::move(r);
    }
    rr.exit_code = any_fail ? 1 : any_skip ? 2 : 0;
    if (write) {
        namespace fs = std::filesystem;
        fs::create_directories(m.output);
        std::ofstream(fs::path(m.output) / "report.json") << rr.report.dump(2) << '\n';
        for (const auto& [name, r] : rr.suites)
            for (const auto& [file, text] : r.csv) {
                std::string stem = name;
                std::replace(stem.begin(), stem.end(), '-', '_');
                std::ofstream(fs::path(m.output) / (stem + "_" + file + ".csv")) << text;
            }
    }
    return rr;
}

}  // namespace osclab
