#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "osclab/errors.hpp"
#include "osclab/experiment.hpp"

using namespace osclab;

namespace {

struct Overrides {
    std::string manifest;
    int degree = 0;
    int window_log2 = 0;
    double step = 0;
    long long seed = -1;
    int threads = -1;
    std::string output;
};

void add_overrides(CLI::App* app, Overrides& o, bool manifest_flag) {
    if (manifest_flag) app->add_option("--manifest", o.manifest, "Base manifest (YAML)");
    app->add_option("--degree", o.degree, "Phase degree d >= 2");
    app->add_option("--window-log2", o.window_log2, "Window is [0, 2^L)");
    app->add_option("--step", o.step, "Cell width (power of two)");
    app->add_option("--seed", o.seed, "Random seed");
    app->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    app->add_option("--output", o.output, "Output directory");
}

void apply(Manifest& m, const Overrides& o) {
    if (o.degree) m.degree = o.degree;
    if (o.window_log2) m.window_log2 = o.window_log2;
    if (o.step > 0) m.step = o.step;
    if (o.seed >= 0) m.seed = static_cast<std::uint64_t>(o.seed);
    if (o.threads >= 0) m.threads = o.threads;
    if (!o.output.empty()) m.output = o.output;
}

int execute(const Manifest& m) {
    const RunResult r = run_experiment(m);
    for (const auto& [name, s] : r.suites) {
        std::printf("%-14s %s", name.c_str(), to_string(s.status).c_str());
        if (!s.reason.empty()) std::printf(" (%s)", s.reason.c_str());
        std::printf("\n");
    }
    std::printf("report: %s/report.json\n", m.output.c_str());
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments for oscillatory singular integrals"};
    app.require_subcommand(1);

    std::string manifest_path;
    Overrides run_over;
    auto* run = app.add_subcommand("run", "Run the suites selected in a manifest");
    run->add_option("manifest", manifest_path, "Manifest file (YAML)")->required();
    add_overrides(run, run_over, false);

    std::map<std::string, Overrides> suite_over;
    std::map<std::string, CLI::App*> suite_cmd;
    for (const auto& name : suite_names()) {
        suite_cmd[name] = app.add_subcommand(name, "Run the " + name + " suite alone");
        add_overrides(suite_cmd[name], suite_over[name], true);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }

    try {
        if (run->parsed()) {
            Manifest m = load_manifest(manifest_path);
            apply(m, run_over);
            return execute(m);
        }
        for (const auto& [name, cmd] : suite_cmd) {
            if (!cmd->parsed()) continue;
            const auto& o = suite_over[name];
            Manifest m = o.manifest.empty() ? Manifest{} : load_manifest(o.manifest);
            apply(m, o);
            m.suites = {name};
            return execute(m);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
