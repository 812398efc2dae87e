#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spdv {

// Regularity constants of a leverage function sigma(t, x, y):
// bound, 1/2-Hoelder-in-time constant, Lipschitz constants in log-spot and
// log-running-maximum, and optional per-node time-jump constants.
struct LeverageConstants {
    double sigma_max = 0.0;
    double c_sigma_t = 0.0;
    double c_sigma_x = 0.0;
    double c_sigma_m = 0.0;
    std::vector<double> jump_constants;  // size N_T; empty means no jumps

    void validate() const;
};

/// Analogous constants for the drift mu(t, x, y).
struct DriftConstants {
    double mu_max = 0.0;
    double c_mu_t = 0.0;
    double c_mu_x = 0.0;
    double c_mu_m = 0.0;

    void validate() const;
};

struct SviSliceParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
};

struct LeverageDescriptor {
    enum class Tag { Constant, Svi, ArctanMax, Custom };
    Tag tag = Tag::Constant;
    double constant_value = 0.0;             // Constant
    SviSliceParams svi_spot;                 // Svi: slice applied to log-spot
    SviSliceParams svi_max;                  // Svi: slice applied to log-max
    double s0 = 0.0;                         // Svi / ArctanMax anchor
    std::optional<std::pair<double, double>> clamp;  // [s_min, s_max] flat extrapolation
};

// Evaluable leverage function with declared regularity constants. Evaluation
// is reentrant and clamps inputs onto the state-space cone y >= max(x, s0)
// so ulp-level undershoots of a running-max update cannot leave the domain.
class LeverageFunction {
public:
    using LogSpaceEval = std::function<double(double t, double log_spot, double log_max)>;

    LeverageFunction() = default;
    LeverageFunction(LogSpaceEval eval, LeverageConstants constants, LeverageDescriptor descriptor);

    /// sigma(t, spot, running_max); spot-space surface.
    double operator()(double t, double spot, double running_max) const;

    /// sigma evaluated directly in log coordinates (hot path of the simulator).
    double eval_log(double t, double log_spot, double log_max) const;

    const LeverageConstants& constants() const { return constants_; }
    const LeverageDescriptor& descriptor() const { return descriptor_; }

    /// Number of declared time jumps N_T (0 when the jump list is empty).
    std::size_t time_jump_count() const { return constants_.jump_constants.size(); }

private:
    LogSpaceEval eval_;
    LeverageConstants constants_;
    LeverageDescriptor descriptor_;
};

/// Drift function mu(t, x, y). Supported shapes are the zero drift, a constant
/// rate, and a piecewise-constant-in-time rate with jumps on grid nodes; each
/// keeps the per-step integral of mu exactly mu(t_n)*dt.
class DriftFunction {
public:
    static DriftFunction zero();
    static DriftFunction constant(double rate);
    static DriftFunction piecewise_in_time(std::vector<double> jump_times,
                                           std::vector<double> rates);

    double operator()(double t, double spot = 0.0, double running_max = 0.0) const;
    const DriftConstants& constants() const { return constants_; }
    bool is_zero() const { return tag_ == Tag::Zero; }

    enum class Tag { Zero, Constant, PiecewiseTime };
    Tag tag() const { return tag_; }
    double rate() const { return rate_; }
    const std::vector<double>& jump_times() const { return jump_times_; }
    const std::vector<double>& rates() const { return rates_; }

private:
    DriftFunction() = default;
    Tag tag_ = Tag::Zero;
    double rate_ = 0.0;
    std::vector<double> jump_times_;
    std::vector<double> rates_;
    DriftConstants constants_;
};

struct SviParams {
    SviSliceParams spot_slice;
    SviSliceParams max_slice;
};

/// SVI-parameterized leverage in both log-spot and log-running-maximum,
/// extrapolated flat outside [s_min, s_max]. Declared constants come from a
/// dense one-dimensional scan of each slice. Throws NegativeSviTotalVariance
/// if the total variance dips below zero on the clamped range.
LeverageFunction svi_leverage(const SviParams& params, double s0, double s_min, double s_max);

/// sigma(t,x,y) = 1 + arctan(log y - log s0); constants are exact:
/// sigma_max = 1 + pi/2, C_x = 0, C_m = 1, C_t = 0.
LeverageFunction arctan_max_leverage(double s0);

/// sigma == value; all regularity constants zero.
LeverageFunction constant_leverage(double value);

// Tensor-grid resolution for numerical constant extraction. The spatial
// bounds default to the descriptor's clamp interval (or a +-3 log-unit band
// around s0 when no clamp is declared).
struct ConstantsGridSpec {
    int n_time = 64;
    int n_x = 256;
    int n_y = 256;
    double horizon = 1.0;
    std::optional<std::pair<double, double>> spot_bounds;  // overrides descriptor bounds
};

/// Grid-sampled suprema of |sigma| and of its log-space difference quotients,
/// restricted to the admissible cone y >= max(x, s0). The time constant scans
/// all node pairs (the sqrt denominator is not telescoping); the space
/// constants scan adjacent nodes, which majorize all pairs.
LeverageConstants estimate_constants(const LeverageFunction& f, const ConstantsGridSpec& grid);

// Spot-space regularity data (bounded interval [s_min, s_max], Lipschitz in
// spot and running max) from which the log-space constants follow.
struct SpotSpaceConstants {
    double value_at_origin = 0.0;  // f(0, s_min, s_min)
    double c_t = 0.0;              // 1/2-Hoelder-in-time constant
    double jump_sum = 0.0;         // sum of time-jump constants
    double c_spot = 0.0;           // Lipschitz in spot
    double c_max = 0.0;            // Lipschitz in running max
    double horizon = 1.0;
};

/// Log-space leverage constants implied by spot-space Lipschitz data on a
/// clamped interval: C_x = C_S * s_max, C_m = C_M * s_max, and the bound
/// value_at_origin + c_t*sqrt(T) + jump_sum + (C_S + C_M)*(s_max - s_min).
LeverageConstants lift_leverage_constants(const SpotSpaceConstants& spot, double s_min,
                                          double s_max);

/// Same transformation for a drift function (bound per the drift inequality).
DriftConstants lift_drift_constants(const SpotSpaceConstants& spot, double s_min, double s_max);

}  // namespace spdv
