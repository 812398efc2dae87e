#include "spdv/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "spdv/errors.hpp"
#include "spdv/rng.hpp"
#include "spdv/simulate.hpp"

namespace spdv {

namespace {

struct MomentStats {
    double mean = 0.0;
    double std_error = 0.0;  // of the mean
};

MomentStats mean_and_se(std::span<const double> values) {
    double sum = 0.0, sum_sq = 0.0;
    for (double v : values) {
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(values.size());
    MomentStats stats;
    stats.mean = sum / n;
    stats.std_error = std::sqrt(std::fmax(sum_sq / n - stats.mean * stats.mean, 0.0) / n);
    return stats;
}

double bootstrap_se(std::span<const double> moments, double p, std::uint64_t seed, int level,
                    int resamples) {
    const std::size_t n = moments.size();
    rng::Substream stream(rng::derive_seed(seed, 0xB007ull), static_cast<std::uint64_t>(level), 0);
    std::vector<double> estimates(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = static_cast<std::size_t>(stream.uniform_open() * static_cast<double>(n));
            sum += moments[idx < n ? idx : n - 1];
        }
        estimates[static_cast<std::size_t>(r)] = std::pow(sum / static_cast<double>(n), 1.0 / p);
    }
    const auto stats = mean_and_se(estimates);
    return stats.std_error * std::sqrt(static_cast<double>(resamples));  // sd of the resamples
}

void attach_fit(ErrorLadder& ladder) {
    try {
        ladder.fit = fit_slope(ladder);
    } catch (const InsufficientResolvedLevels&) {
        ladder.fit.reset();
    }
}

}  // namespace

ErrorLadder strong_ladder(const SpdvModel& model, double horizon, double p, int n_levels,
                          int base_n, long paths, std::uint64_t seed,
                          const StrongLadderOptions& options) {
    if (!(p >= 1.0)) throw POutOfRange("strong_ladder: requires p >= 1");
    if (base_n < 1 || n_levels < 1)
        throw std::invalid_argument("strong_ladder: base_n and n_levels must be >= 1");

    ErrorLadder ladder;
    ladder.norm_order = p;
    ladder.levels.reserve(static_cast<std::size_t>(n_levels));
    std::vector<double> moments(static_cast<std::size_t>(paths));
    for (int level = 0; level < n_levels; ++level) {
        SimGrid grid;
        grid.horizon = horizon;
        grid.steps = base_n << level;
        grid.paths = paths;
        grid.seed = rng::derive_seed(seed, static_cast<std::uint64_t>(level));
        grid.scheme = options.scheme;
        grid.max_mode = options.max_mode;
        const auto pairs = simulate_coupled_pair(model, grid, {.workers = options.workers});
        for (std::size_t i = 0; i < pairs.size(); ++i)
            moments[i] = std::pow(std::fabs(pairs[i].coarse_spot - pairs[i].fine_spot), p);
        const auto stats = mean_and_se(moments);

        LadderLevel entry;
        entry.steps = grid.steps;
        entry.paths_used = paths;
        entry.error = std::pow(stats.mean, 1.0 / p);
        if (stats.mean > 0.0) {
            if (options.bootstrap_std_error) {
                entry.std_error =
                    bootstrap_se(moments, p, seed, level, options.bootstrap_resamples);
            } else {
                // Delta method on the p-th moment estimator.
                entry.std_error =
                    (1.0 / p) * std::pow(stats.mean, 1.0 / p - 1.0) * stats.std_error;
            }
        }
        entry.resolved = entry.error > 2.0 * entry.std_error && entry.error > 0.0;
        if (!std::isfinite(entry.error))
            throw NumericalError("strong_ladder: non-finite error estimate at N = " +
                                 std::to_string(entry.steps));
        ladder.levels.push_back(entry);
    }
    attach_fit(ladder);
    return ladder;
}

ErrorLadder weak_ladder(const SpdvModel& model, double horizon, const PayoffSpec& payoff,
                        int n_levels, int base_n, long paths, std::uint64_t seed, MaxMode max_mode,
                        const WeakLadderOptions& options) {
    payoff.validate();
    if (payoff.kind == PayoffKind::EuropeanPut)
        throw std::invalid_argument("weak_ladder: payoff must be european_call or no_touch_up");
    if (base_n < 1 || n_levels < 1)
        throw std::invalid_argument("weak_ladder: base_n and n_levels must be >= 1");

    ErrorLadder ladder;
    ladder.payoff_tag = std::string(to_string(payoff.kind)) + "_" + std::to_string(payoff.level);
    ladder.levels.reserve(static_cast<std::size_t>(n_levels));
    for (int level = 0; level < n_levels; ++level) {
        SimGrid grid;
        grid.horizon = horizon;
        grid.steps = base_n << level;
        grid.paths = paths;
        grid.scheme = options.scheme;
        grid.max_mode = max_mode;

        LadderLevel entry;
        entry.steps = grid.steps;
        entry.paths_used = paths;
        if (options.couple_within_level) {
            grid.seed = rng::derive_seed(seed, static_cast<std::uint64_t>(level));
            const auto pairs = simulate_coupled_pair(model, grid, {.workers = options.workers});
            std::vector<double> diffs(pairs.size());
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const PathTerminal coarse{pairs[i].coarse_spot, pairs[i].coarse_max, 0.0};
                const PathTerminal fine{pairs[i].fine_spot, pairs[i].fine_max, 0.0};
                diffs[i] = payoff(coarse) - payoff(fine);
            }
            const auto stats = mean_and_se(diffs);
            entry.error = std::fabs(stats.mean);
            entry.std_error = stats.std_error;
        } else {
            auto estimate = [&](int which, int steps) {
                SimGrid g = grid;
                g.steps = steps;
                g.seed = rng::derive_seed(seed, (static_cast<std::uint64_t>(level) << 1) |
                                                    static_cast<std::uint64_t>(which));
                const auto sim = simulate_paths(model, g, {.workers = options.workers});
                std::vector<double> values(sim.terminals.size());
                for (std::size_t i = 0; i < sim.terminals.size(); ++i)
                    values[i] = payoff(sim.terminals[i]);
                return mean_and_se(values);
            };
            const auto coarse = estimate(0, grid.steps);
            const auto fine = estimate(1, 2 * grid.steps);
            entry.error = std::fabs(coarse.mean - fine.mean);
            entry.std_error = std::hypot(coarse.std_error, fine.std_error);
        }
        entry.resolved = entry.error > 2.0 * entry.std_error && entry.error > 0.0;
        if (!std::isfinite(entry.error))
            throw NumericalError("weak_ladder: non-finite error estimate at N = " +
                                 std::to_string(entry.steps));
        ladder.levels.push_back(entry);
    }
    attach_fit(ladder);
    return ladder;
}

SlopeFit fit_slope(const ErrorLadder& ladder) {
    std::vector<double> xs, ys;
    std::vector<int> used;
    for (const auto& level : ladder.levels) {
        if (!level.resolved || !(level.error > 0.0)) continue;
        xs.push_back(std::log2(static_cast<double>(level.steps)));
        ys.push_back(std::log2(level.error));
        used.push_back(level.steps);
    }
    const std::size_t n = xs.size();
    if (n < 3)
        throw InsufficientResolvedLevels("fit_slope: only " + std::to_string(n) +
                                         " resolved levels; need at least 3");
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ssr += r * r;
    }
    fit.slope_se = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
    fit.used_steps = std::move(used);
    return fit;
}

}  // namespace spdv
