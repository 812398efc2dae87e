#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spdv/rng.hpp"
#include "test_helpers.hpp"

using namespace spdv;
using spdv::testing::sample_stats;

TEST_CASE("substreams are deterministic and addressable") {
    rng::Substream a(42, 7, rng::kStreamVarianceNoise);
    rng::Substream b(42, 7, rng::kStreamVarianceNoise);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());

    // Different path or substream ids give different draws.
    rng::Substream c(42, 8, rng::kStreamVarianceNoise);
    rng::Substream d(42, 7, rng::kStreamOrthogonalNoise);
    rng::Substream e(42, 7, rng::kStreamVarianceNoise);
    int equal_c = 0, equal_d = 0;
    for (int i = 0; i < 100; ++i) {
        const double ref = e.normal();
        if (c.normal() == ref) ++equal_c;
        if (d.normal() == ref) ++equal_d;
    }
    CHECK(equal_c == 0);
    CHECK(equal_d == 0);
}

TEST_CASE("uniform_half_open never returns zero and stays in (0,1]") {
    rng::Substream stream(1, 1, rng::kStreamBridgeUniform);
    for (int i = 0; i < 10000; ++i) {
        const double u = stream.uniform_half_open();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("inverse normal CDF round-trips the standard CDF") {
    auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    for (double u : {1e-10, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
        const double z = rng::inverse_normal_cdf(u);
        CHECK(cdf(z) == doctest::Approx(u).epsilon(1e-10));
    }
    CHECK(rng::inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(rng::inverse_normal_cdf(0.0), std::domain_error);
    CHECK_THROWS_AS(rng::inverse_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("normal draws have the right first two moments" * doctest::timeout(60)) {
    rng::Substream stream(123, 0, 0);
    const std::size_t n = 1000000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = stream.normal();
    const auto stats = sample_stats(draws);
    CHECK(std::fabs(stats.mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(stats.variance == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("correlated increments: independence, correlation, determinism" *
          doctest::timeout(60)) {
    const double dt = 0.01;

    // rho = 0: the two sequences are independent streams.
    {
        const auto inc = rng::correlated_increments(5, 0, 50000, dt, 0.0);
        double dot = 0.0;
        for (std::size_t i = 0; i < inc.spot.size(); ++i) dot += inc.spot[i] * inc.variance[i];
        const double corr = dot / (static_cast<double>(inc.spot.size()) * dt);
        CHECK(std::fabs(corr) < 3.0 / std::sqrt(50000.0));
    }

    // rho close to 1: sample correlation within 3/sqrt(n) of rho.
    {
        const double rho = 1.0 - 1e-3;
        const std::size_t n = 1000000;
        const auto inc = rng::correlated_increments(5, 1, n, dt, rho);
        double dot = 0.0, var_s = 0.0, var_v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += inc.spot[i] * inc.variance[i];
            var_s += inc.spot[i] * inc.spot[i];
            var_v += inc.variance[i] * inc.variance[i];
        }
        const double corr = dot / std::sqrt(var_s * var_v);
        CHECK(std::fabs(corr - rho) < 3.0 / std::sqrt(static_cast<double>(n)));
    }

    // Same seed: bit-identical.
    {
        const auto a = rng::correlated_increments(9, 4, 1000, dt, -0.1);
        const auto b = rng::correlated_increments(9, 4, 1000, dt, -0.1);
        for (std::size_t i = 0; i < a.spot.size(); ++i) {
            CHECK(a.spot[i] == b.spot[i]);
            CHECK(a.variance[i] == b.variance[i]);
        }
    }
}

TEST_CASE("increment marginals are Normal(0, dt)" * doctest::timeout(60)) {
    const double dt = 0.25;
    const auto inc = rng::correlated_increments(17, 0, 200000, dt, -0.1);
    const auto stats_s = sample_stats(inc.spot);
    const auto stats_v = sample_stats(inc.variance);
    CHECK(std::fabs(stats_s.mean) < 3.0 * stats_s.std_error);
    CHECK(std::fabs(stats_v.mean) < 3.0 * stats_v.std_error);
    CHECK(stats_s.variance == doctest::Approx(dt).epsilon(0.02));
    CHECK(stats_v.variance == doctest::Approx(dt).epsilon(0.02));
}
