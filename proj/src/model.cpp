#include "spdv/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spdv/errors.hpp"

namespace spdv {

const char* to_string(MaxMode mode) {
    return mode == MaxMode::PiecewiseLinearNodes ? "nodes" : "bridge";
}

SpdvModel::SpdvModel(double s0_, double rho_, CirParams cir_, DriftFunction drift_,
                     LeverageFunction leverage_)
    : s0(s0_), rho(rho_), cir(cir_), drift(std::move(drift_)), leverage(std::move(leverage_)) {
    if (!(s0 > 0.0) || !std::isfinite(s0))
        throw std::invalid_argument("SpdvModel: s0 must be positive and finite");
    if (!(std::fabs(rho) < 1.0))
        throw std::invalid_argument("SpdvModel: rho must lie in (-1, 1)");
}

void validate_grid(const SpdvModel& model, const SimGrid& grid) {
    if (!(grid.horizon > 0.0)) throw std::invalid_argument("SimGrid: horizon must be positive");
    if (grid.steps < 1) throw std::invalid_argument("SimGrid: steps must be >= 1");
    if (grid.paths < 1) throw std::invalid_argument("SimGrid: paths must be >= 1");
    if (grid.scheme == VarianceScheme::Bem) {
        const auto& c = model.cir;
        if (!(4.0 * c.kappa * c.theta > c.xi * c.xi))
            throw FellerTooSmall("BEM scheme requires 4*kappa*theta > xi^2");
    }
    const std::size_t n_t = model.leverage.time_jump_count();
    if (n_t > 0 && static_cast<std::size_t>(grid.steps) % n_t != 0)
        throw std::invalid_argument("SimGrid: steps must be a multiple of the " +
                                    std::to_string(n_t) + " declared leverage time jumps");
}

}  // namespace spdv
