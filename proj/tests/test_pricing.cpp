#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spdv/pricing.hpp"
#include "test_helpers.hpp"

using namespace spdv;

TEST_CASE("Black-Scholes closed form: limits, parity, reference values") {
    // Near-zero strike: the call is worth the forward.
    CHECK(black_scholes_call(1.0, 1e-12, 0.2, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    // Near-zero volatility at zero rate: the intrinsic forward value.
    CHECK(black_scholes_call(1.0, 0.9, 1e-9, 1.0, 0.0) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(black_scholes_call(1.0, 1.1, 1e-9, 1.0, 0.0) == doctest::Approx(0.0));
    // Put-call parity at a nonzero rate.
    for (double strike : {0.8, 1.0, 1.3}) {
        const double call = black_scholes_call(1.0, strike, 0.25, 2.0, 0.03);
        const double put = black_scholes_put(1.0, strike, 0.25, 2.0, 0.03);
        CHECK(call - put == doctest::Approx(1.0 - strike * std::exp(-0.06)).epsilon(1e-12));
    }
    // Independently computed references (30-digit arithmetic).
    CHECK(black_scholes_call(1.0, 0.9, 0.2, 1.0, 0.0) ==
          doctest::Approx(0.135891081160548).epsilon(1e-12));
    CHECK(black_scholes_call(1.0, 1.0, 0.25, 2.0, 0.0) ==
          doctest::Approx(0.140316204801334).epsilon(1e-12));
}

TEST_CASE("payoff kinds evaluate correctly") {
    PathTerminal terminal{1.2, 1.5, 0.02};
    CHECK(PayoffSpec{PayoffKind::EuropeanCall, 0.9}(terminal) == doctest::Approx(0.3));
    CHECK(PayoffSpec{PayoffKind::EuropeanCall, 1.3}(terminal) == 0.0);
    CHECK(PayoffSpec{PayoffKind::EuropeanPut, 1.3}(terminal) ==
          doctest::Approx(0.1).epsilon(1e-12));
    CHECK(PayoffSpec{PayoffKind::NoTouchUp, 1.6}(terminal) == 1.0);
    CHECK(PayoffSpec{PayoffKind::NoTouchUp, 1.5}(terminal) == 0.0);  // tie knocks out
    CHECK(PayoffSpec{PayoffKind::NoTouchUp, 1.4}(terminal) == 0.0);
    const PayoffSpec invalid{PayoffKind::EuropeanCall, 0.0};
    CHECK_THROWS_AS(invalid.validate(), std::invalid_argument);
}

TEST_CASE("martingale spot: near-zero strike call prices the forward" *
          doctest::timeout(120)) {
    auto model = testing::base_svi_model();
    SimGrid grid;
    grid.steps = 64;
    grid.paths = 100000;
    grid.seed = 7001;
    PayoffSpec payoff{PayoffKind::EuropeanCall, 1e-300};
    const auto estimate = mc_price(model, grid, payoff);
    CHECK(std::fabs(estimate.value - model.s0) < 3.0 * estimate.std_error);
}

TEST_CASE("no-touch with a barrier at or below s0 prices to zero") {
    auto model = testing::base_svi_model();
    SimGrid grid;
    grid.steps = 16;
    grid.paths = 2000;
    grid.seed = 3;
    CHECK(mc_price(model, grid, {PayoffKind::NoTouchUp, 1.0}).value == 0.0);
    CHECK(mc_price(model, grid, {PayoffKind::NoTouchUp, 0.7}).value == 0.0);
}

TEST_CASE("Black-Scholes collapse call matches the closed form" * doctest::timeout(120)) {
    const double sigma = 0.2;
    auto model = testing::black_scholes_model(sigma);
    SimGrid grid;
    grid.steps = 32;
    grid.paths = 100000;
    grid.seed = 31337;
    PayoffSpec payoff{PayoffKind::EuropeanCall, 0.9};
    const auto estimate = mc_price(model, grid, payoff);
    const double exact = black_scholes_call(1.0, 0.9, sigma, 1.0, 0.0);
    CHECK(std::fabs(estimate.value - exact) < 3.0 * estimate.std_error);
}

TEST_CASE("price monotonicity on shared seeds") {
    auto model = testing::arctan_model();
    SimGrid grid;
    grid.steps = 32;
    grid.paths = 20000;
    grid.seed = 555;

    double previous = std::numeric_limits<double>::infinity();
    for (double strike : {0.8, 0.9, 1.0, 1.1}) {
        const double value = mc_price(model, grid, {PayoffKind::EuropeanCall, strike}).value;
        CHECK(value <= previous);
        previous = value;
    }

    previous = std::numeric_limits<double>::infinity();
    for (double barrier : {1.6, 1.4, 1.2, 1.1}) {  // decreasing barrier
        const double value = mc_price(model, grid, {PayoffKind::NoTouchUp, barrier}).value;
        CHECK(value <= previous);
        previous = value;
    }
}

TEST_CASE("bridge-mode no-touch price never exceeds the node-mode price") {
    auto model = testing::arctan_model();
    SimGrid grid;
    grid.steps = 16;
    grid.paths = 20000;
    grid.seed = 808;
    for (double barrier : {1.05, 1.1, 1.2, 1.4}) {
        grid.max_mode = MaxMode::PiecewiseLinearNodes;
        const double node_price = mc_price(model, grid, {PayoffKind::NoTouchUp, barrier}).value;
        grid.max_mode = MaxMode::BrownianBridge;
        const double bridge_price = mc_price(model, grid, {PayoffKind::NoTouchUp, barrier}).value;
        CHECK(bridge_price <= node_price);
    }
}

TEST_CASE("zero-rate call prices stay under the spot and discounting applies") {
    auto model = testing::base_svi_model();
    SimGrid grid;
    grid.steps = 16;
    grid.paths = 20000;
    grid.seed = 99;
    const auto undiscounted = mc_price(model, grid, {PayoffKind::EuropeanCall, 0.9});
    CHECK(undiscounted.value < model.s0);
    PayoffSpec discounted{PayoffKind::EuropeanCall, 0.9, 0.05};
    const auto discounted_estimate = mc_price(model, grid, discounted);
    CHECK(discounted_estimate.value ==
          doctest::Approx(undiscounted.value * std::exp(-0.05)).epsilon(1e-12));
    CHECK(!undiscounted.config_digest.empty());
    SimGrid other = grid;
    other.seed = 100;
    CHECK(mc_price(model, other, {PayoffKind::EuropeanCall, 0.9}).config_digest !=
          undiscounted.config_digest);
}
