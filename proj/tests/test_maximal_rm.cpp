#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "osclab/errors.hpp"
#include "osclab/maximal_rm.hpp"

using namespace osclab;

namespace {

FunctionFamily random_family(gen::Rng& r, std::size_t N, std::size_t cells) {
    FunctionFamily fam;
    for (std::size_t j = 0; j < N; ++j) {
        Signal s(0, 1, 1.0 / static_cast<double>(cells));
        for (std::size_t n = 0; n < cells; ++n) s[n] = r.uniform(-1, 1);
        fam.phis.push_back(s);
    }
    return fam;
}

double brute_bessel(const FunctionFamily& fam) {
    const std::size_t N = fam.size();
    std::size_t total = 1;
    for (std::size_t j = 0; j < N; ++j) total *= 3;
    double best = 0;
    for (std::size_t code = 0; code < total; ++code) {
        Signal acc = Signal::zeros_like(fam.phis[0]);
        std::size_t t = code;
        for (std::size_t j = 0; j < N; ++j, t /= 3) acc += cplx(static_cast<double>(t % 3) - 1) * fam.phis[j];
        best = std::max(best, norm_p(acc, 2));
    }
    return best;
}

}  // namespace

TEST_CASE("single function") {
    FunctionFamily fam;
    fam.phis.push_back(Signal::sample(0, 1, 0.25, [](double x) { return cplx(x < 0.5 ? 3 : -1); }));
    const auto A = bessel_constant(fam, 1);
    CHECK(A.exhaustive);
    CHECK(A.value == doctest::Approx(norm_p(fam.phis[0], 2)));
    const Signal M = rm_maximal(fam);
    for (std::size_t n = 0; n < M.size(); ++n) CHECK(M[n].real() == doctest::Approx(std::abs(fam.phis[0][n])));
}

TEST_CASE("orthonormal families have Bessel constant sqrt(N)") {
    for (std::size_t N : {2u, 4u, 8u}) {
        const auto fam = make_family(RmGenerator::RandomSign, N, 64, 7);
        CHECK(bessel_constant(fam, 1).value == doctest::Approx(std::sqrt(static_cast<double>(N))).epsilon(1e-12));
    }
}

TEST_CASE("zero family") {
    FunctionFamily fam;
    for (int j = 0; j < 3; ++j) fam.phis.emplace_back(0, 1, 0.125);
    CHECK(bessel_constant(fam, 1).value == 0);
    CHECK(rm_maximal(fam).sup_norm() == 0);
    CHECK(chaining_maximal(fam).sup_norm() == 0);
}

TEST_CASE("exhaustive search matches brute force") {
    gen::Rng r(71);
    for (int t = 0; t < 10; ++t) {
        const auto fam = random_family(r, static_cast<std::size_t>(r.integer(1, 6)), 16);
        const auto A = bessel_constant(fam, 1);
        CHECK(A.exhaustive);
        CHECK(A.value == doctest::Approx(brute_bessel(fam)).epsilon(1e-10));
        // The reported pattern attains the value.
        Signal acc = Signal::zeros_like(fam.phis[0]);
        for (std::size_t j = 0; j < fam.size(); ++j) acc += cplx(A.pattern[j]) * fam.phis[j];
        CHECK(norm_p(acc, 2) == doctest::Approx(A.value).epsilon(1e-10));
    }
}

TEST_CASE("telescoping family: the maximal function is the running maximum") {
    // φ_j = 1_{[0,1)}·(j-th increment); partial sums are j/N.
    FunctionFamily fam;
    const std::size_t N = 8;
    for (std::size_t j = 0; j < N; ++j) fam.phis.push_back(Signal::sample(0, 1, 0.125, [&](double) { return cplx(1.0 / N); }));
    const Signal M = rm_maximal(fam);
    for (std::size_t n = 0; n < M.size(); ++n) CHECK(M[n].real() == doctest::Approx(1));
    // Alternating signs: partial sums oscillate between 1/N and 0.
    for (std::size_t j = 1; j < N; j += 2) fam.phis[j] *= -1;
    const Signal M2 = rm_maximal(fam);
    for (std::size_t n = 0; n < M2.size(); ++n) CHECK(M2[n].real() == doctest::Approx(1.0 / N));
}

TEST_CASE("chaining dominates the maximal function") {
    gen::Rng r(72);
    for (int t = 0; t < 20; ++t) {
        const auto fam = random_family(r, static_cast<std::size_t>(r.integer(1, 40)), 32);
        const Signal M = rm_maximal(fam), C = chaining_maximal(fam);
        for (std::size_t n = 0; n < M.size(); ++n) CHECK(C[n].real() >= M[n].real() - 1e-12);
    }
}

TEST_CASE("dyadic blocks tile [1, n]") {
    for (std::size_t n = 1; n <= 100; ++n) {
        const auto b = dyadic_blocks(n);
        std::size_t covered = 0, prev_len = SIZE_MAX;
        for (auto [a, e] : b) {
            const std::size_t len = e - a;
            CHECK((len & (len - 1)) == 0);  // power of two
            CHECK(a % len == 0);            // aligned
            CHECK(len < prev_len);          // coarsest first, one per level
            prev_len = len;
            covered += len;
        }
        CHECK(covered == n);
    }
}

TEST_CASE("generators") {
    CHECK(parse_rm_generator("lacunary") == RmGenerator::Lacunary);
    CHECK(to_string(RmGenerator::Constant) == "constant");
    CHECK_THROWS_AS(parse_rm_generator("nope"), ConfigError);
    const auto c = make_family(RmGenerator::Constant, 4, 16, 1);
    CHECK(bessel_constant(c, 1).value == doctest::Approx(1));
    const auto l = make_family(RmGenerator::Lacunary, 6, 256, 1);
    for (const auto& p : l.phis) CHECK(norm_p(p, 2) == doctest::Approx(1).epsilon(1e-9));
    // Same seed, same family.
    const auto a = make_family(RmGenerator::RandomSign, 16, 128, 5), b = make_family(RmGenerator::RandomSign, 16, 128, 5);
    for (std::size_t j = 0; j < 16; ++j) CHECK(a.phis[j].values() == b.phis[j].values());
}

TEST_CASE("Gram-based search agrees with the function-based one") {
    gen::Rng r(73);
    const auto fam = random_family(r, 20, 16);
    const auto A = bessel_constant(fam, 100, 3);
    const auto B = bessel_constant_gram(gram_matrix(fam), 100, 3);
    CHECK(!A.exhaustive);
    CHECK(A.value == doctest::Approx(B.value));
}
