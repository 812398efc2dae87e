#pragma once

#include <string>

#include "spdv/model.hpp"
#include "spdv/simulate.hpp"

namespace spdv {

enum class PayoffKind { EuropeanCall, EuropeanPut, NoTouchUp };

const char* to_string(PayoffKind kind);

// Terminal payoff specification. NoTouchUp pays 1 when the running maximum
// stays strictly below the barrier; a touch (including a floating-point tie)
// knocks the claim out.
struct PayoffSpec {
    PayoffKind kind = PayoffKind::EuropeanCall;
    double level = 1.0;          // strike or barrier
    double discount_rate = 0.0;  // flat rate; zero in the base setting

    void validate() const;
    /// Undiscounted payoff on one terminal state.
    double operator()(const PathTerminal& terminal) const;
};

struct PriceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long paths = 0;
    std::string config_digest;  // digest of model + grid configuration
};

/// Monte Carlo price: discounted sample mean of the payoff over terminal
/// states simulated under (model, grid).
PriceEstimate mc_price(const SpdvModel& model, const SimGrid& grid, const PayoffSpec& payoff,
                       int workers = 0);

/// Black-Scholes call price via the complementary error function.
double black_scholes_call(double s0, double strike, double sigma, double horizon, double rate);

/// Black-Scholes put price (used for parity checks).
double black_scholes_put(double s0, double strike, double sigma, double horizon, double rate);

/// Standard normal CDF, accurate to ~1e-15.
double normal_cdf(double x);

}  // namespace spdv
