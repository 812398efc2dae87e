#pragma once

#include <cstdint>

#include "spdv/cir.hpp"
#include "spdv/leverage.hpp"

namespace spdv {

enum class MaxMode { PiecewiseLinearNodes, BrownianBridge };

const char* to_string(MaxMode mode);

// Full model: spot leg, correlation, variance leg, drift and leverage.
struct SpdvModel {
    double s0;
    double rho;
    CirParams cir;
    DriftFunction drift;
    LeverageFunction leverage;

    SpdvModel(double s0_, double rho_, CirParams cir_, DriftFunction drift_,
              LeverageFunction leverage_);
};

// Simulation grid and sampling configuration.
struct SimGrid {
    double horizon = 1.0;
    int steps = 256;
    long paths = 100000;
    std::uint64_t seed = 0;
    VarianceScheme scheme = VarianceScheme::Fte;
    MaxMode max_mode = MaxMode::PiecewiseLinearNodes;

    double dt() const { return horizon / steps; }
};

/// Validates the grid on its own and against the model (scheme gate, time-jump
/// divisibility). Throws on violation.
void validate_grid(const SpdvModel& model, const SimGrid& grid);

// Per-node path state: log-spot, log-running-max, and the piecewise-constant
// variance in force on the current step.
struct PathState {
    double x = 0.0;      // log S
    double m = 0.0;      // log M, m >= x
    double v_bar = 0.0;  // >= 0
};

}  // namespace spdv
