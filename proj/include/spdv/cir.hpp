#pragma once

#include <limits>
#include <span>
#include <vector>

namespace spdv {

enum class VarianceScheme { Fte, Bem };

const char* to_string(VarianceScheme scheme);

// Parameters of the square-root variance process
//   dv = kappa*(theta - v) dt + xi*sqrt(v) dW^v.
struct CirParams {
    double v0;     // initial variance
    double kappa;  // mean-reversion speed, 1/year
    double theta;  // long-run variance
    double xi;     // vol-of-vol

    CirParams(double v0_, double kappa_, double theta_, double xi_);

    /// Feller ratio nu = 2*kappa*theta / xi^2; +infinity when xi == 0.
    double feller_ratio() const {
        if (xi == 0.0) return std::numeric_limits<double>::infinity();
        return 2.0 * kappa * theta / (xi * xi);
    }

    /// Closed-form mean of the exact process at time t.
    double mean_at(double t) const;
};

// Discretized variance leg on the uniform grid t_n = n*dt. tilde_values holds
// the scheme's state (signed auxiliary value for FTE, Lamperti value for BEM);
// bar_values holds the non-negative piecewise-constant variance read on
// [t_n, t_{n+1}) by the spot leg.
struct VariancePath {
    std::vector<double> step_times;
    std::vector<double> tilde_values;
    std::vector<double> bar_values;
};

/// One full-truncation Euler step. The state stays signed; truncation to the
/// positive part happens only where the drift and diffusion read it.
double fte_step(double v_tilde, const CirParams& params, double dt, double d_wv);

/// One drift-implicit step for the Lamperti value y = sqrt(v), via the closed
/// form positive root of the implicit relation. Requires 4*kappa*theta > xi^2.
double bem_step(double y_tilde, const CirParams& params, double dt, double d_wv);

/// Run a full variance leg over increments of W^v. N = increments.size(),
/// dt = horizon / N. Deterministic in (params, increments).
VariancePath simulate_variance(const CirParams& params, double horizon,
                               std::span<const double> increments, VarianceScheme scheme);

}  // namespace spdv
