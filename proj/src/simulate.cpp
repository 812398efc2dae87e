#include "spdv/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "spdv/errors.hpp"
#include "spdv/rng.hpp"

namespace spdv {

namespace {

int resolve_workers(int requested, long n_items) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (static_cast<long>(n) > n_items) n = static_cast<int>(n_items);
    return n;
}

// Runs fn(lo, hi) over contiguous path blocks; the first exception wins and
// is rethrown on the caller thread.
template <typename Fn>
void parallel_for_paths(long n_paths, int workers, Fn&& fn) {
    const int n_workers = resolve_workers(workers, n_paths);
    if (n_workers == 1) {
        fn(0L, n_paths);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    const long chunk = (n_paths + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
        const long lo = w * chunk;
        const long hi = std::min(n_paths, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                fn(lo, hi);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline double step_log_spot(double x, double mu, double sigma, double v_bar, double dt,
                            double d_ws) {
    return x + mu * dt - 0.5 * sigma * sigma * v_bar * dt + sigma * std::sqrt(v_bar) * d_ws;
}

// Variance leg written into a reusable node buffer (bar values, size n + 1).
void variance_leg(const CirParams& params, double dt, std::span<const double> increments,
                  VarianceScheme scheme, std::vector<double>& bar_out) {
    const std::size_t n = increments.size();
    bar_out.resize(n + 1);
    if (scheme == VarianceScheme::Fte) {
        double v = params.v0;
        bar_out[0] = v > 0.0 ? v : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v = fte_step(v, params, dt, increments[i]);
            bar_out[i + 1] = v > 0.0 ? v : 0.0;
        }
    } else {
        double y = std::sqrt(params.v0);
        bar_out[0] = y * y;
        for (std::size_t i = 0; i < n; ++i) {
            y = bem_step(y, params, dt, increments[i]);
            bar_out[i + 1] = y * y;
        }
    }
}

struct SpotLegOutput {
    double x;
    double m;
};

// Fine increments from the path's substreams plus their exact pairwise-sum
// coarsenings; shared by simulate_coupled_pair and the public inspector.
void fill_coupled_increments(double rho, std::uint64_t seed, std::uint64_t path,
                             std::size_t n_fine, double dt_fine, std::vector<double>& ws_fine,
                             std::vector<double>& wv_fine, std::vector<double>& ws_coarse,
                             std::vector<double>& wv_coarse) {
    ws_fine.resize(n_fine);
    wv_fine.resize(n_fine);
    ws_coarse.resize(n_fine / 2);
    wv_coarse.resize(n_fine / 2);
    rng::Substream variance_noise(seed, path, rng::kStreamVarianceNoise);
    rng::Substream orthogonal_noise(seed, path, rng::kStreamOrthogonalNoise);
    const double root_dt = std::sqrt(dt_fine);
    const double ortho_scale = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n_fine; ++i) {
        wv_fine[i] = root_dt * variance_noise.normal();
        ws_fine[i] = rho * wv_fine[i] + ortho_scale * root_dt * orthogonal_noise.normal();
    }
    for (std::size_t i = 0; i < n_fine / 2; ++i) {
        wv_coarse[i] = wv_fine[2 * i] + wv_fine[2 * i + 1];
        ws_coarse[i] = ws_fine[2 * i] + ws_fine[2 * i + 1];
    }
}

// Log-Euler spot leg over n steps, reading sigma and v-bar at the left node.
// In bridge mode one uniform is consumed on every step, degenerate or not, so
// stream alignment survives parameter sweeps. `history`, when non-null,
// receives the state at every node.
SpotLegOutput spot_leg(const SpdvModel& model, double dt, std::size_t n,
                       std::span<const double> v_bar, std::span<const double> d_ws, MaxMode mode,
                       rng::Substream* bridge_uniforms, long path_index,
                       std::vector<PathState>* history) {
    double x = std::log(model.s0);
    double m = x;
    if (history) {
        history->clear();
        history->push_back({x, m, v_bar[0]});
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        const double mu = model.drift(t);
        const double sigma = model.leverage.eval_log(t, x, m);
        const double v = v_bar[i];
        const double x_next = step_log_spot(x, mu, sigma, v, dt, d_ws[i]);
        if (!std::isfinite(x_next))
            throw NumericalError("non-finite log-spot at path " + std::to_string(path_index) +
                                 " step " + std::to_string(i));
        if (mode == MaxMode::BrownianBridge) {
            const double u = bridge_uniforms->uniform_half_open();
            m = bridge_max_update(x, x_next, sigma, v, dt, u, m);
        } else {
            m = m > x_next ? m : x_next;
        }
        x = x_next;
        if (history) history->push_back({x, m, v_bar[i + 1]});
    }
    return {x, m};
}

}  // namespace

PathState log_euler_step(const PathState& state, const SpdvModel& model, double t, double dt,
                         double d_ws) {
    if (!std::isfinite(state.x) || !std::isfinite(state.m) || !std::isfinite(state.v_bar))
        throw std::invalid_argument("log_euler_step: non-finite state");
    if (!(dt > 0.0)) throw std::invalid_argument("log_euler_step: dt must be positive");
    const double mu = model.drift(t, std::exp(state.x), std::exp(state.m));
    const double sigma = model.leverage.eval_log(t, state.x, state.m);
    PathState next;
    next.x = step_log_spot(state.x, mu, sigma, state.v_bar, dt, d_ws);
    next.m = state.m > next.x ? state.m : next.x;
    next.v_bar = state.v_bar;
    return next;
}

double bridge_max_update(double x_n, double x_next, double sigma_n, double v_bar_n, double dt,
                         double u, double m) {
    if (!(u > 0.0 && u <= 1.0))
        throw std::invalid_argument("bridge_max_update: u must lie in (0,1]");
    const double diffusion = sigma_n * sigma_n * v_bar_n * dt;
    if (!(diffusion >= 0.0))
        throw std::invalid_argument("bridge_max_update: sigma^2 * v_bar * dt must be >= 0");
    const double dx = x_next - x_n;
    // log u <= 0, so the radicand dominates dx^2.
    const double m_hat = 0.5 * (x_next + x_n + std::sqrt(dx * dx - 2.0 * diffusion * std::log(u)));
    return m > m_hat ? m : m_hat;
}

SimulationResult simulate_paths(const SpdvModel& model, const SimGrid& grid,
                                const SimOptions& options) {
    validate_grid(model, grid);
    const std::size_t n = static_cast<std::size_t>(grid.steps);
    const double dt = grid.dt();

    SimulationResult result;
    result.terminals.resize(static_cast<std::size_t>(grid.paths));
    if (options.store_paths) {
        result.node_times.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) result.node_times[i] = dt * static_cast<double>(i);
        result.full_paths.resize(static_cast<std::size_t>(grid.paths));
    }

    parallel_for_paths(grid.paths, options.workers, [&](long lo, long hi) {
        std::vector<double> d_ws(n), d_wv(n), v_bar;
        for (long p = lo; p < hi; ++p) {
            rng::Substream variance_noise(grid.seed, static_cast<std::uint64_t>(p),
                                          rng::kStreamVarianceNoise);
            rng::Substream orthogonal_noise(grid.seed, static_cast<std::uint64_t>(p),
                                            rng::kStreamOrthogonalNoise);
            const double root_dt = std::sqrt(dt);
            const double ortho_scale = std::sqrt(1.0 - model.rho * model.rho);
            for (std::size_t i = 0; i < n; ++i) {
                d_wv[i] = root_dt * variance_noise.normal();
                d_ws[i] = model.rho * d_wv[i] + ortho_scale * root_dt * orthogonal_noise.normal();
            }
            variance_leg(model.cir, dt, d_wv, grid.scheme, v_bar);
            rng::Substream bridge(grid.seed, static_cast<std::uint64_t>(p),
                                  rng::kStreamBridgeUniform);
            std::vector<PathState>* history =
                options.store_paths ? &result.full_paths[static_cast<std::size_t>(p)] : nullptr;
            const auto leg = spot_leg(model, dt, n, v_bar, d_ws, grid.max_mode, &bridge, p,
                                      history);
            result.terminals[static_cast<std::size_t>(p)] = {std::exp(leg.x), std::exp(leg.m),
                                                             v_bar[n]};
        }
    });
    return result;
}

std::vector<CoupledTerminal> simulate_coupled_pair(const SpdvModel& model, const SimGrid& grid,
                                                   const SimOptions& options) {
    validate_grid(model, grid);
    const std::size_t n_coarse = static_cast<std::size_t>(grid.steps);
    const std::size_t n_fine = 2 * n_coarse;
    const double dt_fine = grid.horizon / static_cast<double>(n_fine);
    const double dt_coarse = grid.horizon / static_cast<double>(n_coarse);

    std::vector<CoupledTerminal> result(static_cast<std::size_t>(grid.paths));
    parallel_for_paths(grid.paths, options.workers, [&](long lo, long hi) {
        std::vector<double> ws_fine, wv_fine, ws_coarse, wv_coarse, bar_fine, bar_coarse;
        for (long p = lo; p < hi; ++p) {
            // Coarse increments are the exact pairwise sums of the fine ones:
            // both legs ride the same Brownian path.
            fill_coupled_increments(model.rho, grid.seed, static_cast<std::uint64_t>(p), n_fine,
                                    dt_fine, ws_fine, wv_fine, ws_coarse, wv_coarse);
            variance_leg(model.cir, dt_fine, wv_fine, grid.scheme, bar_fine);
            variance_leg(model.cir, dt_coarse, wv_coarse, grid.scheme, bar_coarse);

            rng::Substream bridge_fine(grid.seed, static_cast<std::uint64_t>(p),
                                       rng::kStreamBridgeUniform);
            rng::Substream bridge_coarse(grid.seed, static_cast<std::uint64_t>(p),
                                         rng::kStreamBridgeUniformCoarse);
            const auto fine =
                spot_leg(model, dt_fine, n_fine, bar_fine, ws_fine, grid.max_mode, &bridge_fine,
                         p, nullptr);
            const auto coarse = spot_leg(model, dt_coarse, n_coarse, bar_coarse, ws_coarse,
                                         grid.max_mode, &bridge_coarse, p, nullptr);
            result[static_cast<std::size_t>(p)] = {std::exp(coarse.x), std::exp(fine.x),
                                                   std::exp(coarse.m), std::exp(fine.m)};
        }
    });
    return result;
}

CoupledIncrements coupled_increments_for_path(const SpdvModel& model, const SimGrid& grid,
                                              std::uint64_t path_index) {
    validate_grid(model, grid);
    const std::size_t n_fine = 2 * static_cast<std::size_t>(grid.steps);
    const double dt_fine = grid.horizon / static_cast<double>(n_fine);
    CoupledIncrements out;
    fill_coupled_increments(model.rho, grid.seed, path_index, n_fine, dt_fine, out.fine_spot,
                            out.fine_variance, out.coarse_spot, out.coarse_variance);
    return out;
}

}  // namespace spdv
