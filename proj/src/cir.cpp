#include "spdv/cir.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spdv/errors.hpp"

namespace spdv {

namespace {

void require_finite(double value, const char* name) {
    if (!std::isfinite(value))
        throw std::invalid_argument(std::string("non-finite input: ") + name);
}

}  // namespace

const char* to_string(VarianceScheme scheme) {
    return scheme == VarianceScheme::Fte ? "fte" : "bem";
}

CirParams::CirParams(double v0_, double kappa_, double theta_, double xi_)
    : v0(v0_), kappa(kappa_), theta(theta_), xi(xi_) {
    require_finite(v0, "v0");
    require_finite(kappa, "kappa");
    require_finite(theta, "theta");
    require_finite(xi, "xi");
    if (!(v0 > 0.0)) throw std::invalid_argument("CirParams: v0 must be positive");
    if (!(kappa > 0.0)) throw std::invalid_argument("CirParams: kappa must be positive");
    if (!(theta > 0.0)) throw std::invalid_argument("CirParams: theta must be positive");
    if (!(xi >= 0.0)) throw std::invalid_argument("CirParams: xi must be non-negative");
}

double CirParams::mean_at(double t) const {
    return theta + (v0 - theta) * std::exp(-kappa * t);
}

double fte_step(double v_tilde, const CirParams& params, double dt, double d_wv) {
    require_finite(v_tilde, "v_tilde");
    require_finite(d_wv, "d_wv");
    if (!(dt > 0.0)) throw std::invalid_argument("fte_step: dt must be positive");
    const double v_plus = v_tilde > 0.0 ? v_tilde : 0.0;
    return v_tilde + params.kappa * (params.theta - v_plus) * dt +
           params.xi * std::sqrt(v_plus) * d_wv;
}

double bem_step(double y_tilde, const CirParams& params, double dt, double d_wv) {
    require_finite(y_tilde, "y_tilde");
    require_finite(d_wv, "d_wv");
    if (!(dt > 0.0)) throw std::invalid_argument("bem_step: dt must be positive");
    if (!(y_tilde > 0.0)) throw std::invalid_argument("bem_step: y_tilde must be positive");
    const double alpha = (4.0 * params.kappa * params.theta - params.xi * params.xi) / 8.0;
    if (!(alpha > 0.0))
        throw FellerTooSmall("bem_step: requires 4*kappa*theta > xi^2 (alpha > 0)");
    const double beta = -0.5 * params.kappa;
    const double gamma = 0.5 * params.xi;
    const double denom = 1.0 - beta * dt;  // = 1 + kappa*dt/2 > 1
    const double half = (y_tilde + gamma * d_wv) / (2.0 * denom);
    // Radicand is positive in exact arithmetic; clamp guards round-off only.
    const double radicand = std::fmax(half * half + alpha * dt / denom, 0.0);
    return half + std::sqrt(radicand);
}

VariancePath simulate_variance(const CirParams& params, double horizon,
                               std::span<const double> increments, VarianceScheme scheme) {
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_variance: horizon must be positive");
    if (increments.empty()) throw std::invalid_argument("simulate_variance: no increments");
    const std::size_t n = increments.size();
    const double dt = horizon / static_cast<double>(n);

    VariancePath path;
    path.step_times.resize(n + 1);
    path.tilde_values.resize(n + 1);
    path.bar_values.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        path.step_times[i] = dt * static_cast<double>(i);

    if (scheme == VarianceScheme::Fte) {
        double v = params.v0;
        path.tilde_values[0] = v;
        path.bar_values[0] = v > 0.0 ? v : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v = fte_step(v, params, dt, increments[i]);
            path.tilde_values[i + 1] = v;
            path.bar_values[i + 1] = v > 0.0 ? v : 0.0;
        }
    } else {
        double y = std::sqrt(params.v0);
        path.tilde_values[0] = y;
        path.bar_values[0] = y * y;
        for (std::size_t i = 0; i < n; ++i) {
            y = bem_step(y, params, dt, increments[i]);
            path.tilde_values[i + 1] = y;
            path.bar_values[i + 1] = y * y;
        }
    }
    return path;
}

}  // namespace spdv
