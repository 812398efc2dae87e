#include "spdv/leverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "spdv/errors.hpp"

namespace spdv {

namespace {

void require_non_negative(double v, const char* name) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(name) + " must be non-negative");
}

// SVI total variance a + b*(c*(z-d) + sqrt((z-d)^2 + e^2)).
double svi_total_variance(const SviSliceParams& p, double z) {
    const double zd = z - p.d;
    return p.a + p.b * (p.c * zd + std::sqrt(zd * zd + p.e * p.e));
}

// One SVI slice sigma_i(u, z) = sqrt(total_variance(z) / u), u = t + 1.
double svi_slice(const SviSliceParams& p, double u, double z) {
    return std::sqrt(svi_total_variance(p, z) / u);
}

void validate_svi_slice(const SviSliceParams& p, double z_lo, double z_hi, const char* which) {
    if (p.e == 0.0)
        throw std::invalid_argument(std::string("svi_leverage: e must be nonzero (") + which + ")");
    constexpr int kScan = 4097;
    for (int i = 0; i < kScan; ++i) {
        const double z = z_lo + (z_hi - z_lo) * i / (kScan - 1);
        if (svi_total_variance(p, z) < 0.0)
            throw NegativeSviTotalVariance(std::string("svi_leverage: total variance negative at z=") +
                                           std::to_string(z) + " (" + which + ")");
    }
}

// Dense scan of sup |f| and sup of adjacent difference quotients on [lo, hi].
struct ScanResult {
    double sup_abs = 0.0;
    double lipschitz = 0.0;
};

template <typename F>
ScanResult scan_1d(F&& f, double lo, double hi, int n = 32769) {
    ScanResult r;
    double prev = f(lo);
    r.sup_abs = std::fabs(prev);
    const double h = (hi - lo) / (n - 1);
    for (int i = 1; i < n; ++i) {
        const double cur = f(lo + i * h);
        r.sup_abs = std::fmax(r.sup_abs, std::fabs(cur));
        r.lipschitz = std::fmax(r.lipschitz, std::fabs(cur - prev) / h);
        prev = cur;
    }
    return r;
}

}  // namespace

void LeverageConstants::validate() const {
    require_non_negative(sigma_max, "sigma_max");
    require_non_negative(c_sigma_t, "c_sigma_t");
    require_non_negative(c_sigma_x, "c_sigma_x");
    require_non_negative(c_sigma_m, "c_sigma_m");
    for (double j : jump_constants) require_non_negative(j, "jump constant");
}

void DriftConstants::validate() const {
    require_non_negative(mu_max, "mu_max");
    require_non_negative(c_mu_t, "c_mu_t");
    require_non_negative(c_mu_x, "c_mu_x");
    require_non_negative(c_mu_m, "c_mu_m");
}

LeverageFunction::LeverageFunction(LogSpaceEval eval, LeverageConstants constants,
                                   LeverageDescriptor descriptor)
    : eval_(std::move(eval)), constants_(std::move(constants)), descriptor_(std::move(descriptor)) {
    constants_.validate();
}

double LeverageFunction::eval_log(double t, double log_spot, double log_max) const {
    // Cone guard: a running max can undershoot max(x, log s0) by an ulp.
    double m = log_max < log_spot ? log_spot : log_max;
    if (descriptor_.s0 > 0.0) {
        const double anchor = std::log(descriptor_.s0);
        if (m < anchor) m = anchor;
    }
    return eval_(t, log_spot, m);
}

double LeverageFunction::operator()(double t, double spot, double running_max) const {
    if (!(spot > 0.0) || !(running_max > 0.0))
        throw std::invalid_argument("LeverageFunction: spot and running max must be positive");
    return eval_log(t, std::log(spot), std::log(running_max));
}

DriftFunction DriftFunction::zero() { return DriftFunction{}; }

DriftFunction DriftFunction::constant(double rate) {
    if (!std::isfinite(rate)) throw std::invalid_argument("DriftFunction: non-finite rate");
    DriftFunction f;
    f.tag_ = Tag::Constant;
    f.rate_ = rate;
    f.constants_.mu_max = std::fabs(rate);
    return f;
}

DriftFunction DriftFunction::piecewise_in_time(std::vector<double> jump_times,
                                               std::vector<double> rates) {
    if (rates.empty()) throw std::invalid_argument("DriftFunction: empty rate list");
    if (jump_times.size() + 1 != rates.size())
        throw std::invalid_argument("DriftFunction: need one more rate than jump time");
    if (!std::is_sorted(jump_times.begin(), jump_times.end()))
        throw std::invalid_argument("DriftFunction: jump times must be sorted");
    DriftFunction f;
    f.tag_ = Tag::PiecewiseTime;
    f.jump_times_ = std::move(jump_times);
    f.rates_ = std::move(rates);
    double max_abs = 0.0, max_gap = 0.0;
    for (std::size_t i = 0; i < f.rates_.size(); ++i) {
        max_abs = std::fmax(max_abs, std::fabs(f.rates_[i]));
        if (i > 0) max_gap = std::fmax(max_gap, std::fabs(f.rates_[i] - f.rates_[i - 1]));
    }
    f.constants_.mu_max = max_abs;
    f.constants_.c_mu_t = max_gap;  // indicator-type time term of the drift inequality
    return f;
}

double DriftFunction::operator()(double t, double, double) const {
    switch (tag_) {
        case Tag::Zero: return 0.0;
        case Tag::Constant: return rate_;
        case Tag::PiecewiseTime: {
            const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
            return rates_[static_cast<std::size_t>(it - jump_times_.begin())];
        }
    }
    return 0.0;
}

LeverageFunction svi_leverage(const SviParams& params, double s0, double s_min, double s_max) {
    if (!(s_min > 0.0 && s_min < s0 && s0 < s_max))
        throw std::invalid_argument("svi_leverage: need 0 < s_min < s0 < s_max");
    const double z_lo = std::log(s_min / s0);
    const double z_hi = std::log(s_max / s0);
    validate_svi_slice(params.spot_slice, z_lo, z_hi, "spot slice");
    validate_svi_slice(params.max_slice, z_lo, z_hi, "max slice");

    const double log_s0 = std::log(s0);
    const SviSliceParams p1 = params.spot_slice;
    const SviSliceParams p2 = params.max_slice;
    auto eval = [p1, p2, log_s0, z_lo, z_hi](double t, double lx, double lm) {
        const double u = t + 1.0;
        const double zx = std::clamp(lx - log_s0, z_lo, z_hi);
        const double zy = std::clamp(lm - log_s0, z_lo, z_hi);
        return 0.5 * (svi_slice(p1, u, zx) + svi_slice(p2, u, zy));
    };

    // Declared constants from dense 1-d scans of each slice. The time factor
    // u^{-1/2} is monotone, so every slice peaks at u = 1 and the 1/2-Hoelder
    // time constant is sup_z w(z) * sup_{u1<u2} (u1^-1/2 - u2^-1/2)/sqrt(u2-u1).
    LeverageConstants constants;
    const auto spot_scan = scan_1d([&](double z) { return svi_slice(p1, 1.0, z); }, z_lo, z_hi);
    const double y_lo = std::fmax(z_lo, 0.0);  // running max never drops below s0
    const auto max_scan = scan_1d([&](double z) { return svi_slice(p2, 1.0, z); }, y_lo, z_hi);
    constants.sigma_max = 0.5 * (spot_scan.sup_abs + max_scan.sup_abs);
    constants.c_sigma_x = 0.5 * spot_scan.lipschitz;
    constants.c_sigma_m = 0.5 * max_scan.lipschitz;
    double time_factor = 0.0;  // over u in [1, 2]: pairs, sqrt-denominator
    constexpr int kTimePts = 513;
    for (int i = 0; i < kTimePts; ++i) {
        const double u1 = 1.0 + static_cast<double>(i) / (kTimePts - 1);
        for (int j = i + 1; j < kTimePts; ++j) {
            const double u2 = 1.0 + static_cast<double>(j) / (kTimePts - 1);
            time_factor = std::fmax(time_factor, (1.0 / std::sqrt(u1) - 1.0 / std::sqrt(u2)) /
                                                     std::sqrt(u2 - u1));
        }
    }
    constants.c_sigma_t = 0.5 * (spot_scan.sup_abs + max_scan.sup_abs) * time_factor;

    LeverageDescriptor desc;
    desc.tag = LeverageDescriptor::Tag::Svi;
    desc.svi_spot = params.spot_slice;
    desc.svi_max = params.max_slice;
    desc.s0 = s0;
    desc.clamp = std::make_pair(s_min, s_max);
    return LeverageFunction(std::move(eval), std::move(constants), std::move(desc));
}

LeverageFunction arctan_max_leverage(double s0) {
    if (!(s0 > 0.0)) throw std::invalid_argument("arctan_max_leverage: s0 must be positive");
    const double log_s0 = std::log(s0);
    auto eval = [log_s0](double, double, double lm) { return 1.0 + std::atan(lm - log_s0); };
    LeverageConstants constants;
    constants.sigma_max = 1.0 + std::numbers::pi / 2.0;
    constants.c_sigma_m = 1.0;  // sup of 1/(1+z^2)
    LeverageDescriptor desc;
    desc.tag = LeverageDescriptor::Tag::ArctanMax;
    desc.s0 = s0;
    return LeverageFunction(std::move(eval), std::move(constants), std::move(desc));
}

LeverageFunction constant_leverage(double value) {
    require_non_negative(value, "constant leverage value");
    auto eval = [value](double, double, double) { return value; };
    LeverageConstants constants;
    constants.sigma_max = value;
    LeverageDescriptor desc;
    desc.tag = LeverageDescriptor::Tag::Constant;
    desc.constant_value = value;
    return LeverageFunction(std::move(eval), std::move(constants), std::move(desc));
}

LeverageConstants estimate_constants(const LeverageFunction& f, const ConstantsGridSpec& grid) {
    if (grid.n_time < 2 || grid.n_x < 2 || grid.n_y < 2)
        throw std::invalid_argument("estimate_constants: need at least 2 points per axis");
    if (!(grid.horizon > 0.0))
        throw std::invalid_argument("estimate_constants: horizon must be positive");

    double s_lo, s_hi;
    if (grid.spot_bounds) {
        std::tie(s_lo, s_hi) = *grid.spot_bounds;
    } else if (f.descriptor().clamp) {
        std::tie(s_lo, s_hi) = *f.descriptor().clamp;
    } else {
        const double anchor = f.descriptor().s0 > 0.0 ? f.descriptor().s0 : 1.0;
        s_lo = anchor * std::exp(-3.0);
        s_hi = anchor * std::exp(3.0);
    }
    if (!(s_lo > 0.0 && s_lo < s_hi))
        throw std::invalid_argument("estimate_constants: invalid spot bounds");

    const double anchor = f.descriptor().s0 > 0.0 ? f.descriptor().s0 : std::sqrt(s_lo * s_hi);
    const double lx_lo = std::log(s_lo), lx_hi = std::log(s_hi);
    // The running max lives on y >= max(x, s0): truncate its axis at s0.
    const double ly_lo = std::fmax(lx_lo, std::log(anchor)), ly_hi = lx_hi;

    const int nt = grid.n_time, nx = grid.n_x, ny = grid.n_y;
    std::vector<double> ts(nt), lxs(nx), lys(ny);
    for (int i = 0; i < nt; ++i) ts[i] = grid.horizon * i / (nt - 1);
    for (int i = 0; i < nx; ++i) lxs[i] = lx_lo + (lx_hi - lx_lo) * i / (nx - 1);
    for (int i = 0; i < ny; ++i) lys[i] = ly_lo + (ly_hi - ly_lo) * i / (ny - 1);

    // Full tensor of values; admissible cells require log x <= log y.
    std::vector<double> values(static_cast<std::size_t>(nt) * ny * nx);
    auto at = [&](int it, int iy, int ix) -> double& {
        return values[(static_cast<std::size_t>(it) * ny + iy) * nx + ix];
    };
    for (int it = 0; it < nt; ++it)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                at(it, iy, ix) =
                    lxs[ix] <= lys[iy] ? f.eval_log(ts[it], lxs[ix], lys[iy])
                                       : std::numeric_limits<double>::quiet_NaN();

    LeverageConstants out;
    const double hx = lxs[1] - lxs[0];
    const double hy = ny > 1 ? lys[1] - lys[0] : 1.0;
    for (int it = 0; it < nt; ++it) {
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const double v = at(it, iy, ix);
                if (std::isnan(v)) continue;
                out.sigma_max = std::fmax(out.sigma_max, std::fabs(v));
                if (ix + 1 < nx && lxs[ix + 1] <= lys[iy])
                    out.c_sigma_x =
                        std::fmax(out.c_sigma_x, std::fabs(at(it, iy, ix + 1) - v) / hx);
                if (iy + 1 < ny)
                    out.c_sigma_m =
                        std::fmax(out.c_sigma_m, std::fabs(at(it, iy + 1, ix) - v) / hy);
            }
        }
    }
    // Time direction: all pairs, since |t1-t2|^{1/2} does not telescope.
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            if (lxs[ix] > lys[iy]) continue;
            for (int i = 0; i < nt; ++i) {
                const double vi = at(i, iy, ix);
                for (int j = i + 1; j < nt; ++j) {
                    const double q =
                        std::fabs(at(j, iy, ix) - vi) / std::sqrt(ts[j] - ts[i]);
                    out.c_sigma_t = std::fmax(out.c_sigma_t, q);
                }
            }
        }
    }
    return out;
}

LeverageConstants lift_leverage_constants(const SpotSpaceConstants& spot, double s_min,
                                          double s_max) {
    if (!(s_max > 0.0) || !(s_min >= 0.0) || !(s_min < s_max))
        throw std::invalid_argument("lift_leverage_constants: need 0 <= s_min < s_max");
    LeverageConstants out;
    out.sigma_max = spot.value_at_origin + spot.c_t * std::sqrt(spot.horizon) + spot.jump_sum +
                    (spot.c_spot + spot.c_max) * (s_max - s_min);
    out.c_sigma_t = spot.c_t;
    out.c_sigma_x = spot.c_spot * s_max;
    out.c_sigma_m = spot.c_max * s_max;
    return out;
}

DriftConstants lift_drift_constants(const SpotSpaceConstants& spot, double s_min, double s_max) {
    if (!(s_max > 0.0) || !(s_min >= 0.0) || !(s_min < s_max))
        throw std::invalid_argument("lift_drift_constants: need 0 <= s_min < s_max");
    DriftConstants out;
    out.mu_max = std::fabs(spot.value_at_origin) + spot.c_t +
                 (spot.c_spot + spot.c_max) * (s_max - s_min);
    out.c_mu_t = spot.c_t;
    out.c_mu_x = spot.c_spot * s_max;
    out.c_mu_m = spot.c_max * s_max;
    return out;
}

}  // namespace spdv
