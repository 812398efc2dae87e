#include "spdv/critical_time.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdv/errors.hpp"

namespace spdv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Adaptive Simpson quadrature with absolute tolerance.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Golden-section search for the minimum of a unimodal-ish objective on [a,b].
// Used only to polish a bracket found by a dense grid, so mild multimodality
// costs accuracy, not correctness of the bracket.
template <typename F>
double golden_minimize(F&& f, double a, double b, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// arctan-form horizon 2/sqrt(d) * [pi/2 + arctan(k/sqrt(d))] with d = (c - k^2)+.
Horizon arctan_horizon(double c, double kappa) {
    const double d = c - kappa * kappa;
    if (!(d > 0.0)) return Horizon::unbounded();
    const double root = std::sqrt(d);
    return Horizon::finite(2.0 / root * (std::numbers::pi / 2.0 + std::atan(kappa / root)));
}

}  // namespace

Horizon Horizon::finite(double value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::invalid_argument("Horizon: finite value must be positive");
    return Horizon(value);
}

double SchemeGate::nu_star() const {
    return scheme == VarianceScheme::Fte ? 2.0 + std::sqrt(3.0) : 2.0;
}

double SchemeGate::p_star(double nu) const {
    if (scheme == VarianceScheme::Fte) {
        if (std::isinf(nu)) return kInf;
        return (nu - 1.0) * (nu - 1.0) / nu;
    }
    return nu;
}

double phi0(double s) {
    const double integral =
        integrate([](double u) { return std::exp(0.5 * u * u); }, 0.0, s, 1e-10);
    return -std::exp(0.5 * s * s) + s * integral;
}

double beta0() {
    static const double root = [] {
        double lo = 1.0, hi = 2.0;
        const double f_lo = phi0(lo), f_hi = phi0(hi);
        if (!(f_lo < 0.0 && f_hi > 0.0))
            throw NumericalError("beta0: bracket [1,2] does not straddle the root");
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            (phi0(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return root;
}

double phi(double p, double xi, double sigma_max) {
    if (!(p >= 1.0)) throw POutOfRange("phi: requires p >= 1");
    const double bracket = p + std::sqrt((p - 1.0) * p);
    return xi * xi * sigma_max * sigma_max * bracket * bracket;
}

CriticalInputs CriticalInputs::from(const CirParams& cir, const LeverageConstants& lc) {
    return {cir.kappa, cir.xi, cir.feller_ratio(), lc.sigma_max, lc.c_sigma_x, lc.c_sigma_m};
}

double phi_tilde(double p, double q, const CriticalInputs& in) {
    if (!(q > p)) throw std::invalid_argument("phi_tilde: requires q > p");
    const double c = in.c_sigma_x + in.c_sigma_m;
    const double b0 = beta0();
    const double radicand = (2.0 + b0 * b0) * c * c * q + 2.0 * c * (2.0 * in.sigma_max - c);
    if (radicand < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double bracket = std::sqrt(radicand) + b0 * c * std::sqrt(q);
    return p * q * in.xi * in.xi / (2.0 * (q - p)) * bracket * bracket;
}

Horizon t_x(double p, const CriticalInputs& in, VarianceScheme scheme) {
    const SchemeGate gate{scheme};
    const double p_star = gate.p_star(in.nu);
    if (!(p >= 1.0) || !(p < p_star))
        throw POutOfRange("t_x: requires 1 <= p < p*(nu) = " + std::to_string(p_star));
    if (in.xi == 0.0 || in.c_sigma_x + in.c_sigma_m == 0.0) return Horizon::unbounded();

    // Infimum of phi_tilde over the open interval (p, p*): dense interior grid
    // offset from the endpoints, then golden-section polish on the best bracket.
    const double hi = std::isinf(p_star) ? std::fmax(4.0 * p, p + 100.0) : p_star;
    const double width = hi - p;
    const double eps = 1e-6 * width;
    constexpr int kGrid = 2001;
    double best = kInf;
    int best_i = -1;
    std::vector<double> qs(kGrid);
    bool any_valid = false;
    for (int i = 0; i < kGrid; ++i) {
        qs[i] = p + eps + (width - 2.0 * eps) * i / (kGrid - 1);
        const double value = phi_tilde(p, qs[i], in);
        if (std::isnan(value)) continue;
        any_valid = true;
        if (value < best) {
            best = value;
            best_i = i;
        }
    }
    if (!any_valid)
        throw NumericalError(
            "t_x: phi_tilde radicand negative across the whole q-range "
            "(c_sigma_x + c_sigma_m > 2*sigma_max lies outside the supported regime)");
    const double lo_q = qs[best_i > 0 ? best_i - 1 : 0];
    const double hi_q = qs[best_i + 1 < kGrid ? best_i + 1 : kGrid - 1];
    const double q_min = golden_minimize(
        [&](double q) {
            const double v = phi_tilde(p, q, in);
            return std::isnan(v) ? kInf : v;
        },
        lo_q, hi_q, 1e-12 * width);
    const double phi_star = std::fmin(best, phi_tilde(p, q_min, in));
    return arctan_horizon(phi_star, in.kappa);
}

Horizon t_s(double r, double kappa, double xi, double sigma_max, MomentScheme scheme) {
    if (!(r > 1.0)) throw POutOfRange("t_s: requires r > 1");
    const double value = phi(r, xi, sigma_max);
    if (value == 0.0) return Horizon::unbounded();
    switch (scheme) {
        case MomentScheme::Fte:
            if (value < 4.0 * kappa * kappa) return Horizon::finite(4.0 * kappa / value);
            return Horizon::finite(1.0 / (std::sqrt(value) - kappa));
        case MomentScheme::Bem:
            return Horizon::finite(1.0 / std::sqrt(value));
        case MomentScheme::Cir:
            return arctan_horizon(value, kappa);
    }
    return Horizon::unbounded();
}

CriticalTimeReport t_star(double p, const CriticalInputs& in, VarianceScheme scheme,
                          double requested_horizon) {
    const SchemeGate gate{scheme};
    if (!(in.nu > gate.nu_star()))
        throw FellerGateFailed("t_star: Feller ratio " + std::to_string(in.nu) +
                               " must exceed nu* = " + std::to_string(gate.nu_star()) + " for " +
                               std::string(to_string(scheme)));
    const double p_star = gate.p_star(in.nu);
    if (!(p >= 1.0) || !(p < p_star))
        throw POutOfRange("t_star: requires 1 <= p < p*(nu) = " + std::to_string(p_star));

    const MomentScheme moment_scheme =
        scheme == VarianceScheme::Fte ? MomentScheme::Fte : MomentScheme::Bem;
    auto objective = [&](double q) -> Horizon {
        const Horizon hx = t_x(q, in, scheme);
        const Horizon hs = t_s(p * q / (q - p), in.kappa, in.xi, in.sigma_max, moment_scheme);
        return hx < hs ? hx : hs;
    };

    const double lo = std::fmax(2.0, p);
    const double hi = std::isinf(p_star) ? std::fmax(4.0 * lo, lo + 100.0) : p_star;
    const double width = hi - lo;
    const double eps = 1e-6 * width;
    constexpr int kGrid = 2001;
    double best = -1.0;
    double best_q = lo + eps;
    Horizon best_h = Horizon::unbounded();
    bool best_unbounded = false;
    for (int i = 0; i < kGrid; ++i) {
        const double q = lo + eps + (width - 2.0 * eps) * i / (kGrid - 1);
        const Horizon h = objective(q);
        if (h.is_unbounded()) {
            best_unbounded = true;
            best_q = q;
            best_h = h;
            break;
        }
        if (h.value() > best) {
            best = h.value();
            best_q = q;
            best_h = h;
        }
    }

    CriticalTimeReport report;
    report.p = p;
    report.requested_horizon = requested_horizon;
    if (!best_unbounded) {
        // Polish the supremum around the best grid point.
        const double step = (width - 2.0 * eps) / (kGrid - 1);
        const double lo_q = std::fmax(lo + eps, best_q - step);
        const double hi_q = std::fmin(hi - eps, best_q + step);
        const double q_ref = golden_minimize(
            [&](double q) {
                const Horizon h = objective(q);
                return h.is_unbounded() ? -kInf : -h.value();
            },
            lo_q, hi_q, 1e-12 * width);
        const Horizon refined = objective(q_ref);
        if (refined >= best_h) {
            best_h = refined;
            best_q = q_ref;
        }
    }
    report.q_argmax = best_q;
    report.t_star = best_h;
    report.t_x = t_x(best_q, in, scheme);
    report.t_s = t_s(p * best_q / (best_q - p), in.kappa, in.xi, in.sigma_max, moment_scheme);
    report.admissible = requested_horizon > 0.0 && Horizon::finite(requested_horizon) < best_h;
    return report;
}

}  // namespace spdv
