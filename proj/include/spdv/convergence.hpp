#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spdv/model.hpp"
#include "spdv/pricing.hpp"

namespace spdv {

struct LadderLevel {
    int steps = 0;             // N for this level; the proxy compares N vs 2N
    double error = 0.0;        // error estimate
    double std_error = 0.0;    // Monte Carlo standard error of the estimate
    long paths_used = 0;
    bool resolved = false;     // |error| > 2 * std_error
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    std::vector<int> used_steps;  // levels that entered the regression
};

// Per-refinement-level error estimates plus the fitted log2-log2 slope.
// Levels are sorted ascending in N and each N doubles the previous one.
struct ErrorLadder {
    std::vector<LadderLevel> levels;
    double norm_order = 0.0;   // p for strong ladders, 0 for weak ladders
    std::string payoff_tag;    // weak ladders only
    std::optional<SlopeFit> fit;
};

struct StrongLadderOptions {
    int workers = 0;
    VarianceScheme scheme = VarianceScheme::Fte;
    MaxMode max_mode = MaxMode::PiecewiseLinearNodes;
    bool bootstrap_std_error = false;  // replace the delta-method SE estimate
    int bootstrap_resamples = 200;
};

/// Strong L^p error ladder via the refinement-coupled proxy
/// E[|S_{T,N} - S_{T,2N}|^p]^(1/p) at N = base_n * 2^j. Standard errors come
/// from the delta method on the empirical p-th moment (or a bootstrap).
ErrorLadder strong_ladder(const SpdvModel& model, double horizon, double p, int n_levels,
                          int base_n, long paths, std::uint64_t seed,
                          const StrongLadderOptions& options = {});

struct WeakLadderOptions {
    int workers = 0;
    VarianceScheme scheme = VarianceScheme::Fte;
    // The two step counts of a level share one Brownian path by default: the
    // expectation difference is unchanged and its standard error shrinks by
    // orders of magnitude, which is what makes desk-scale path counts resolve
    // any level at all. Independent sampling is kept for comparison runs.
    bool couple_within_level = true;
};

/// Weak error ladder |E f(S_{T,N}) - E f(S_{T,2N})| for a terminal payoff at
/// N = base_n * 2^j. Levels use mutually independent randomness derived from
/// one master seed.
ErrorLadder weak_ladder(const SpdvModel& model, double horizon, const PayoffSpec& payoff,
                        int n_levels, int base_n, long paths, std::uint64_t seed,
                        MaxMode max_mode, const WeakLadderOptions& options = {});

/// Ordinary least squares of log2(error) on log2(N) over the resolved levels
/// with nonzero error. Throws InsufficientResolvedLevels below 3 usable points.
SlopeFit fit_slope(const ErrorLadder& ladder);

}  // namespace spdv
