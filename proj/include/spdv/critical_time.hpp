#pragma once

#include <compare>
#include <limits>

#include "spdv/cir.hpp"
#include "spdv/leverage.hpp"

namespace spdv {

// A time horizon that is either finite and positive or unbounded. The model
// collapses (constant leverage, vanishing vol-of-vol) genuinely produce
// infinite horizons, so unboundedness is first-class rather than a sentinel.
class Horizon {
public:
    static Horizon unbounded() { return Horizon(std::numeric_limits<double>::infinity()); }
    static Horizon finite(double value);

    bool is_unbounded() const { return value_ == std::numeric_limits<double>::infinity(); }
    /// Finite value, or +infinity when unbounded.
    double value() const { return value_; }

    friend auto operator<=>(const Horizon& a, const Horizon& b) { return a.value_ <=> b.value_; }
    friend bool operator==(const Horizon& a, const Horizon& b) { return a.value_ == b.value_; }

private:
    explicit Horizon(double value) : value_(value) {}
    double value_;
};

// Scheme-dependent admissibility thresholds of the rate theorem:
// the Feller gate nu* and the maximal moment order p*(nu).
struct SchemeGate {
    VarianceScheme scheme;

    double nu_star() const;
    double p_star(double nu) const;
};

/// Unique positive root of phi0(s) = -exp(s^2/2) + s*int_0^s exp(u^2/2) du,
/// to absolute tolerance 1e-8 (bisection on [1,2], adaptive quadrature).
/// Computed once per process and cached.
double beta0();

/// phi0 itself, exposed for residual checks.
double phi0(double s);

/// phi(p) = xi^2 * sigma_max^2 * (p + sqrt((p-1)p))^2. Requires p >= 1.
double phi(double p, double xi, double sigma_max);

// Model constants feeding the critical-time formulas.
struct CriticalInputs {
    double kappa;
    double xi;
    double nu;  // Feller ratio
    double sigma_max;
    double c_sigma_x;
    double c_sigma_m;

    static CriticalInputs from(const CirParams& cir, const LeverageConstants& lc);
};

/// The intermediate map phi_tilde(p, q); NaN when the radicand is negative
/// (only possible when c_sigma_x + c_sigma_m > 2*sigma_max, outside the
/// supported input regime).
double phi_tilde(double p, double q, const CriticalInputs& in);

/// Exponential-moment horizon of the log-spot error term: infimum of
/// phi_tilde over q in (p, p*), mapped through the arctan formula. Unbounded
/// when the infimum does not exceed kappa^2. Requires 1 <= p < p*(nu).
Horizon t_x(double p, const CriticalInputs& in, VarianceScheme scheme);

enum class MomentScheme { Fte, Bem, Cir };

/// Moment-bound horizon T_S(r) for the chosen process; requires r > 1.
/// Satisfies Cir >= Fte >= Bem for every r.
Horizon t_s(double r, double kappa, double xi, double sigma_max, MomentScheme scheme);

struct CriticalTimeReport {
    double p = 0.0;
    Horizon t_x = Horizon::unbounded();     // T*_x at the maximizing q
    Horizon t_s = Horizon::unbounded();     // T*_S at p*q/(q-p) for the maximizing q
    Horizon t_star = Horizon::unbounded();  // the critical time itself
    double q_argmax = 0.0;
    double requested_horizon = 0.0;
    bool admissible = false;  // requested_horizon < t_star
};

/// Critical time T*(p) = sup over q in (2 v p, p*) of min(T_x(q), T_S(pq/(q-p))),
/// by dense interior grid plus golden-section refinement. Throws
/// FellerGateFailed when nu <= nu* and POutOfRange when p is outside [1, p*).
CriticalTimeReport t_star(double p, const CriticalInputs& in, VarianceScheme scheme,
                          double requested_horizon = 0.0);

}  // namespace spdv
