#pragma once

#include <cstdint>
#include <vector>

#include "spdv/model.hpp"

namespace spdv {

// Terminal state of one simulated path.
struct PathTerminal {
    double spot;         // S_T > 0
    double running_max;  // M_T >= max(S_T, S_0)
    double variance;     // terminal v-bar
};

struct SimOptions {
    int workers = 0;          // 0 = hardware concurrency
    bool store_paths = false; // keep full (x, m, v_bar) node history
};

struct SimulationResult {
    std::vector<PathTerminal> terminals;            // one entry per path, path order
    std::vector<double> node_times;                 // only when store_paths
    std::vector<std::vector<PathState>> full_paths; // [path][node], only when store_paths
};

/// One log-Euler step of the spot leg; reads drift, leverage and variance at
/// the left node and updates the node running maximum.
PathState log_euler_step(const PathState& state, const SpdvModel& model, double t, double dt,
                         double d_ws);

/// Brownian-bridge running-max update over one step with left-node diffusion
/// coefficient sigma_n^2 * v_bar_n. u must lie in (0,1]; returns the updated
/// log running maximum max(m, m_hat).
double bridge_max_update(double x_n, double x_next, double sigma_n, double v_bar_n, double dt,
                         double u, double m);

/// Simulate grid.paths independent paths. Deterministic in (model, grid):
/// per-path substreams are keyed on (seed, path index), so results do not
/// depend on the worker count.
SimulationResult simulate_paths(const SpdvModel& model, const SimGrid& grid,
                                const SimOptions& options = {});

// Terminal states of a coarse/fine refinement pair driven by the same
// Brownian path (coarse increments are the exact pairwise sums of the fine
// ones).
struct CoupledTerminal {
    double coarse_spot;  // N steps
    double fine_spot;    // 2N steps
    double coarse_max;
    double fine_max;
};

/// grid.steps is the coarse step count N; the fine leg runs 2N steps. Bridge
/// uniforms, when enabled, come from independent substreams per level.
std::vector<CoupledTerminal> simulate_coupled_pair(const SpdvModel& model, const SimGrid& grid,
                                                   const SimOptions& options = {});

// The exact Brownian increments a coupled pair drives one path with: fine
// sequences of length 2 * grid.steps and their pairwise-sum coarsenings.
struct CoupledIncrements {
    std::vector<double> fine_spot;
    std::vector<double> fine_variance;
    std::vector<double> coarse_spot;
    std::vector<double> coarse_variance;
};

/// Reproduces the increment construction of simulate_coupled_pair for one
/// path index (same substreams, same arithmetic, bit-identical values).
CoupledIncrements coupled_increments_for_path(const SpdvModel& model, const SimGrid& grid,
                                              std::uint64_t path_index);

}  // namespace spdv
