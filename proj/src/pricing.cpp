#include "spdv/pricing.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spdv/config.hpp"
#include "spdv/errors.hpp"

namespace spdv {

const char* to_string(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::EuropeanCall: return "european_call";
        case PayoffKind::EuropeanPut: return "european_put";
        case PayoffKind::NoTouchUp: return "no_touch_up";
    }
    return "?";
}

void PayoffSpec::validate() const {
    if (!(level > 0.0) || !std::isfinite(level))
        throw std::invalid_argument("PayoffSpec: strike/barrier must be positive");
    if (!std::isfinite(discount_rate))
        throw std::invalid_argument("PayoffSpec: non-finite discount rate");
}

double PayoffSpec::operator()(const PathTerminal& terminal) const {
    switch (kind) {
        case PayoffKind::EuropeanCall:
            return terminal.spot > level ? terminal.spot - level : 0.0;
        case PayoffKind::EuropeanPut:
            return terminal.spot < level ? level - terminal.spot : 0.0;
        case PayoffKind::NoTouchUp:
            return terminal.running_max < level ? 1.0 : 0.0;
    }
    return 0.0;
}

PriceEstimate mc_price(const SpdvModel& model, const SimGrid& grid, const PayoffSpec& payoff,
                       int workers) {
    payoff.validate();
    const auto result = simulate_paths(model, grid, {.workers = workers});
    const double discount = std::exp(-payoff.discount_rate * grid.horizon);

    double sum = 0.0, sum_sq = 0.0;
    for (const auto& terminal : result.terminals) {
        const double value = payoff(terminal);
        sum += value;
        sum_sq += value * value;
    }
    const double n = static_cast<double>(result.terminals.size());
    const double mean = sum / n;
    const double var = std::fmax(sum_sq / n - mean * mean, 0.0);
    if (!std::isfinite(mean)) throw NumericalError("mc_price: non-finite estimate");

    PriceEstimate estimate;
    estimate.value = discount * mean;
    estimate.std_error = discount * std::sqrt(var / n);
    estimate.paths = grid.paths;
    estimate.config_digest = config_digest(model, grid);
    return estimate;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double black_scholes_call(double s0, double strike, double sigma, double horizon, double rate) {
    if (!(s0 > 0.0 && strike > 0.0 && sigma > 0.0 && horizon > 0.0))
        throw std::invalid_argument("black_scholes_call: s0, strike, sigma, horizon must be > 0");
    const double vol = sigma * std::sqrt(horizon);
    const double d1 = (std::log(s0 / strike) + (rate + 0.5 * sigma * sigma) * horizon) / vol;
    const double d2 = d1 - vol;
    return s0 * normal_cdf(d1) - strike * std::exp(-rate * horizon) * normal_cdf(d2);
}

double black_scholes_put(double s0, double strike, double sigma, double horizon, double rate) {
    // Parity: put = call - s0 + K e^{-rT}.
    return black_scholes_call(s0, strike, sigma, horizon, rate) - s0 +
           strike * std::exp(-rate * horizon);
}

}  // namespace spdv
