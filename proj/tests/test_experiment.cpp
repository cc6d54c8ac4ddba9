#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "osclab/errors.hpp"
#include "osclab/experiment.hpp"

using namespace osclab;

namespace {

std::string error_path(const std::string& yaml) {
    try {
        parse_manifest(yaml);
    } catch (const ConfigError& e) {
        return e.path;
    }
    return "<none>";
}

std::string error_text(const std::string& yaml) {
    try {
        parse_manifest(yaml);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("defaults parse from an empty manifest") {
    const Manifest m = parse_manifest("");
    CHECK(m.degree == 2);
    CHECK(m.k0 == 3);
    CHECK(m.corpus.size() == default_corpus().size());
    int total = 0;
    for (const auto& g : m.corpus) total += g.count;
    CHECK(total == 200);
}

TEST_CASE("configuration errors carry the field path") {
    CHECK(error_path("degree: 1") == "degree");
    CHECK(error_path("step: 0.3") == "step");
    CHECK(error_path("scales: {k_max: 40}") == "scales.k_max");
    CHECK(error_path("bogus: 1") == "bogus");
    CHECK(error_path("suites: [kernel-bounds, nope]") == "suites[1]");
    CHECK(error_path("cz_trace: {K: 2}") == "cz_trace.K");
    CHECK(error_path("cz_trace: {test: sideways}") == "cz_trace.test");
    CHECK(error_path("rm_check: {generators: [random_sign, wobbly]}") == "rm_check.generators[1]");
    CHECK(error_path("weights: {weak_exponents: [0.5]}") == "weights.weak_exponents[0]");
    CHECK(error_path("sparse_bound: {r_values: [3]}") == "sparse_bound.r_values[0]");
    CHECK(error_path("corpus: [{generator: spikes}, {generator: zigzag}]") == "corpus[1].generator");
    CHECK(error_text("corpus: [{generator: zigzag}]").find("zigzag") != std::string::npos);
    CHECK(error_path("degree: [1, 2]") == "degree");
    CHECK(error_path("degree: 2\n  : :") != "<none>");
}

TEST_CASE("empty suite selection passes with an empty report") {
    Manifest m = parse_manifest("suites: []");
    m.output = "exp_empty_out";
    const RunResult r = run_experiment(m);
    CHECK(r.exit_code == 0);
    CHECK(r.report.empty());
    CHECK(std::filesystem::exists("exp_empty_out/report.json"));
    std::filesystem::remove_all("exp_empty_out");
}

TEST_CASE("explicit corpus entries") {
    const Manifest m = parse_manifest(R"(
window_log2: 6
step: 0.5
corpus:
  - {generator: indicators, intervals: [[4, 8], [10.5, 12]], height: 2}
  - {generator: spikes, cells: [3, 100]}
)");
    const auto c = generate_corpus(m.corpus, m, 1);
    REQUIRE(c.size() == 4);
    CHECK(integrate(c[0], 0, 64).real() == doctest::Approx(8));
    CHECK(integrate(c[1], 0, 64).real() == doctest::Approx(3));
    CHECK(c[2][3] == cplx(1));
    CHECK(c[3][100] == cplx(1));
    CHECK(norm_p(c[3], 1) == doctest::Approx(0.5));

    Manifest bad = m;
    bad.corpus = {GeneratorSpec{"spikes", 1, {}, {0}}};
    CHECK_THROWS_AS(generate_corpus(bad.corpus, bad, 1), ConfigError);
}

TEST_CASE("generated corpora are deterministic and nonnegative") {
    Manifest m = parse_manifest("window_log2: 8");
    const auto a = generate_corpus(m.corpus, m, 9), b = generate_corpus(m.corpus, m, 9);
    const auto c = generate_corpus(m.corpus, m, 10);
    REQUIRE(a.size() == 200);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].values() == b[i].values());
        differs = differs || a[i].values() != c[i].values();
        CHECK(a[i][0] == cplx(0));
        CHECK(a[i][a[i].size() - 1] == cplx(0));
        for (const auto& v : a[i].values()) CHECK(v.real() >= 0);
    }
    CHECK(differs);
}

TEST_CASE("kernel-bounds suite reports slope fields") {
    Manifest m = parse_manifest(R"(
suites: [kernel-bounds]
kernel_bounds: {degrees: [2], ranges: {2: [6, 10]}, partition_samples: 100}
)");
    const auto r = run_kernel_bounds(m);
    const auto& c = r.constants["d2"];
    CHECK(c.contains("slope_tail"));
    CHECK(c.contains("span_tail"));
    CHECK(c["resolution_pass"].get<bool>());
    CHECK(c["partition_violations"].get<int>() == 0);
    CHECK(r.csv.count("same_scale"));
}

TEST_CASE("reports do not depend on the thread count") {
    const std::string yaml = R"(
window_log2: 8
step: 0.5
suites: [sparse-bound, rm-check]
corpus: [{generator: indicators, count: 4}, {generator: random_nonnegative, count: 4, density: 0.1}]
rm_check: {generators: [random_sign], N: [2, 8, 16], cells: 256, trials: 20}
)";
    Manifest m1 = parse_manifest(yaml), m4 = m1;
    m1.threads = 1;
    m4.threads = 4;
    const auto r1 = run_experiment(m1, false), r4 = run_experiment(m4, false);
    CHECK(r1.report.dump() == r4.report.dump());
}
