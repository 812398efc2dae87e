#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spdv/convergence.hpp"
#include "spdv/model.hpp"
#include "spdv/pricing.hpp"

namespace spdv {

// Declarative experiment description. The on-disk form is JSON with comments
// (// and /* */) allowed; serialization round-trips losslessly. Every field
// has a default equal to the base parameter set (s0 = 1, v0 = 0.025,
// kappa = 8, theta = 0.02, xi = 0.2, rho = -0.1, horizon = 1).
struct ExperimentConfig {
    struct Drift {
        std::string tag = "zero";  // zero | constant | piecewise
        double rate = 0.0;
        std::vector<double> jump_times;
        std::vector<double> rates;
    };
    struct Leverage {
        std::string tag = "svi";  // constant | svi | arctan_max
        double constant_value = 1.0;
        SviSliceParams svi_spot{1.0, 2.0, 0.0, 0.0, 0.25};
        SviSliceParams svi_max{1.0, 2.0, 0.0, 0.0, 0.25};
        // Clamp half-width in units of sqrt(v0 * horizon) log-units; the
        // default 3 reproduces exp(+-3 sqrt(v0 T)) around s0.
        std::optional<double> s_min;
        std::optional<double> s_max;
    };
    struct Model {
        double s0 = 1.0;
        double rho = -0.1;
        double v0 = 0.025;
        double kappa = 8.0;
        double theta = 0.02;
        double xi = 0.2;
        Drift drift;
        Leverage leverage;
    };
    struct Grid {
        double horizon = 1.0;
        int steps = 256;
        long paths = 100000;
        std::uint64_t seed = 42;
        std::string scheme = "fte";     // fte | bem
        std::string max_mode = "nodes"; // nodes | bridge
    };
    struct Experiment {
        // price / weak-order
        std::string payoff = "european_call";  // european_call | european_put | no_touch_up
        double payoff_level = 0.9;
        double discount_rate = 0.0;
        // strong-order / weak-order ladders
        double p = 1.0;
        int levels = 6;
        int base_n = 16;
        std::vector<double> kappa_sweep;  // strong-order: one ladder per kappa
        bool couple_weak_levels = true;
        // critical-time
        std::vector<double> p_values{1.0, 2.0};
        // optional explicit constants (skip grid extraction)
        std::optional<double> sigma_max;
        std::optional<double> c_sigma_x;
        std::optional<double> c_sigma_m;
    };
    struct Output {
        std::string directory = ".";
        bool dump_paths = false;
        bool stamp = false;
    };

    Model model;
    Grid grid;
    Experiment experiment;
    Output output;
};

/// Parse a config document (JSON, comments allowed). Unknown keys and
/// malformed values raise ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);

/// Read and parse a config file.
ExperimentConfig load_config(const std::string& path);

/// Canonical serialized form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Materialize the model block (builds drift and leverage functions).
SpdvModel build_model(const ExperimentConfig& config);

/// Materialize the grid block.
SimGrid build_grid(const ExperimentConfig& config);

/// Materialize the payoff block of the experiment section.
PayoffSpec build_payoff(const ExperimentConfig& config);

/// FNV-1a digest of the canonical serialized model + grid blocks.
std::string config_digest(const ExperimentConfig& config);

/// Digest of an already-materialized model/grid pair (descriptor-based).
std::string config_digest(const SpdvModel& model, const SimGrid& grid);

}  // namespace spdv
