#include "spdv/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "spdv/convergence.hpp"
#include "spdv/critical_time.hpp"
#include "spdv/errors.hpp"
#include "spdv/pricing.hpp"
#include "spdv/simulate.hpp"

namespace spdv {

namespace {

namespace fs = std::filesystem;

std::string fmt_num(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

std::string fmt_horizon(const Horizon& h) { return h.is_unbounded() ? "inf" : fmt_num(h.value()); }

// Atomic artifact write: temp file in the target directory, then rename.
void write_atomic(const fs::path& path, const std::string& body) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << body;
    }
    fs::rename(tmp, path);
}

std::string provenance(const ExperimentConfig& cfg) {
    std::ostringstream head;
    head << "# spdv " << kVersion << "\n";
    head << "# config " << config_digest(cfg) << "\n";
    head << "# seed " << cfg.grid.seed << "\n";
    if (cfg.output.stamp) {
        const auto now = std::chrono::system_clock::now();
        head << "# generated "
             << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
             << "\n";
    }
    return head.str();
}

void require_finite_csv(double value, const std::string& what) {
    if (!std::isfinite(value)) throw NumericalError("non-finite value in " + what);
}

std::string ladder_csv(const ExperimentConfig& cfg, const ErrorLadder& ladder) {
    std::ostringstream body;
    body << provenance(cfg);
    body << "N,error,stderr,paths,resolved\n";
    for (const auto& level : ladder.levels) {
        require_finite_csv(level.error, "ladder error");
        require_finite_csv(level.std_error, "ladder stderr");
        body << level.steps << "," << fmt_num(level.error) << "," << fmt_num(level.std_error)
             << "," << level.paths_used << "," << (level.resolved ? 1 : 0) << "\n";
    }
    if (ladder.fit) {
        body << "slope,slope_se,levels_used\n";
        body << fmt_num(ladder.fit->slope) << "," << fmt_num(ladder.fit->slope_se) << ","
             << ladder.fit->used_steps.size() << "\n";
    } else {
        body << "# slope unresolved (fewer than 3 resolved levels)\n";
    }
    return body.str();
}

std::string payoff_file_tag(const PayoffSpec& payoff) {
    std::string tag = to_string(payoff.kind);
    tag += "_";
    tag += fmt_num(payoff.level);
    return tag;
}

CriticalInputs critical_inputs(const ExperimentConfig& cfg, const SpdvModel& model) {
    LeverageConstants constants = model.leverage.constants();
    if (cfg.experiment.sigma_max) constants.sigma_max = *cfg.experiment.sigma_max;
    if (cfg.experiment.c_sigma_x) constants.c_sigma_x = *cfg.experiment.c_sigma_x;
    if (cfg.experiment.c_sigma_m) constants.c_sigma_m = *cfg.experiment.c_sigma_m;
    return CriticalInputs::from(model.cir, constants);
}

// Theorem-hypothesis check for convergence studies. Returns a warning string
// when the requested horizon is outside the guaranteed regime; empty when all
// hypotheses hold.
std::string admissibility_warning(const ExperimentConfig& cfg, const SpdvModel& model,
                                  double p_order, VarianceScheme scheme) {
    const CriticalInputs in = critical_inputs(cfg, model);
    const SchemeGate gate{scheme};
    if (!(in.nu > gate.nu_star())) {
        return "Feller ratio nu = " + fmt_num(in.nu) + " does not exceed nu* = " +
               fmt_num(gate.nu_star()) + " for " + to_string(scheme) +
               "; the rate theorem does not apply";
    }
    if (!(p_order >= 1.0 && p_order < gate.p_star(in.nu))) {
        return "moment order p = " + fmt_num(p_order) + " is outside [1, p*) with p* = " +
               fmt_num(gate.p_star(in.nu));
    }
    const auto report = t_star(p_order, in, scheme, cfg.grid.horizon);
    if (!report.admissible) {
        return "requested horizon T = " + fmt_num(cfg.grid.horizon) +
               " is not below the critical time T*(p) = " + fmt_horizon(report.t_star);
    }
    return {};
}

void run_simulate(const ExperimentConfig& cfg, const RunOptions& options, std::ostream& out) {
    const SpdvModel model = build_model(cfg);
    const SimGrid grid = build_grid(cfg);
    validate_grid(model, grid);
    SimOptions sim_options{.workers = options.workers, .store_paths = cfg.output.dump_paths};
    const auto result = simulate_paths(model, grid, sim_options);

    double sum_s = 0.0, sum_s2 = 0.0, sum_m = 0.0, sum_v = 0.0;
    for (const auto& t : result.terminals) {
        sum_s += t.spot;
        sum_s2 += t.spot * t.spot;
        sum_m += t.running_max;
        sum_v += t.variance;
    }
    const double n = static_cast<double>(result.terminals.size());
    const double mean_s = sum_s / n;
    const double sd_s = std::sqrt(std::fmax(sum_s2 / n - mean_s * mean_s, 0.0));
    out << "paths " << grid.paths << "  steps " << grid.steps << "  scheme "
        << to_string(grid.scheme) << "  max " << to_string(grid.max_mode) << "\n";
    out << "E[S_T] = " << fmt_num(mean_s) << "  sd = " << fmt_num(sd_s)
        << "  se = " << fmt_num(sd_s / std::sqrt(n)) << "\n";
    out << "E[M_T] = " << fmt_num(sum_m / n) << "  E[v_T] = " << fmt_num(sum_v / n) << "\n";

    if (cfg.output.dump_paths) {
        std::ostringstream body;
        body << provenance(cfg);
        body << "path,step,t,x,m,v_bar\n";
        for (std::size_t p = 0; p < result.full_paths.size(); ++p) {
            const auto& nodes = result.full_paths[p];
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                require_finite_csv(nodes[i].x, "path dump");
                body << p << "," << i << "," << fmt_num(result.node_times[i]) << ","
                     << fmt_num(nodes[i].x) << "," << fmt_num(nodes[i].m) << ","
                     << fmt_num(nodes[i].v_bar) << "\n";
            }
        }
        const fs::path file = fs::path(cfg.output.directory) /
                              ("paths_" + std::string(to_string(grid.scheme)) + "_" +
                               std::to_string(grid.seed) + ".csv");
        write_atomic(file, body.str());
        out << "wrote " << file.string() << "\n";
    }
}

void run_price(const ExperimentConfig& cfg, const RunOptions& options, std::ostream& out) {
    const SpdvModel model = build_model(cfg);
    const SimGrid grid = build_grid(cfg);
    validate_grid(model, grid);
    const PayoffSpec payoff = build_payoff(cfg);
    const auto estimate = mc_price(model, grid, payoff, options.workers);
    require_finite_csv(estimate.value, "price");

    std::ostringstream body;
    body << provenance(cfg);
    body << "payoff,param,value,stderr,paths\n";
    body << to_string(payoff.kind) << "," << fmt_num(payoff.level) << ","
         << fmt_num(estimate.value) << "," << fmt_num(estimate.std_error) << ","
         << estimate.paths << "\n";
    const fs::path file =
        fs::path(cfg.output.directory) / ("price_" + std::string(to_string(grid.scheme)) + "_" +
                                          payoff_file_tag(payoff) + "_" +
                                          std::to_string(grid.seed) + ".csv");
    write_atomic(file, body.str());
    out << to_string(payoff.kind) << "," << fmt_num(payoff.level) << ","
        << fmt_num(estimate.value) << "," << fmt_num(estimate.std_error) << ","
        << estimate.paths << "\n";
    out << "wrote " << file.string() << "\n";
}

void run_critical_time(const ExperimentConfig& cfg, const RunOptions&, std::ostream& out) {
    const SpdvModel model = build_model(cfg);
    const SimGrid grid = build_grid(cfg);
    const CriticalInputs in = critical_inputs(cfg, model);

    std::ostringstream body;
    body << provenance(cfg);
    body << "p,T_x,T_S,T_star,q_argmax,admissible\n";
    out << "p        T_x          T_S          T_star       q*        admissible(T=" << fmt_num(cfg.grid.horizon)
        << ")\n";
    for (double p : cfg.experiment.p_values) {
        const auto report = t_star(p, in, grid.scheme, cfg.grid.horizon);
        body << fmt_num(p) << "," << fmt_horizon(report.t_x) << "," << fmt_horizon(report.t_s)
             << "," << fmt_horizon(report.t_star) << "," << fmt_num(report.q_argmax) << ","
             << (report.admissible ? 1 : 0) << "\n";
        char line[160];
        std::snprintf(line, sizeof(line), "%-8g %-12s %-12s %-12s %-9.6g %s\n", p,
                      fmt_horizon(report.t_x).c_str(), fmt_horizon(report.t_s).c_str(),
                      fmt_horizon(report.t_star).c_str(), report.q_argmax,
                      report.admissible ? "yes" : "no");
        out << line;
    }
    const fs::path file = fs::path(cfg.output.directory) /
                          ("critical_time_" + std::string(to_string(grid.scheme)) + "_" +
                           std::to_string(grid.seed) + ".csv");
    write_atomic(file, body.str());
    out << "wrote " << file.string() << "\n";
}

void run_strong_order(const ExperimentConfig& cfg, const RunOptions& options, std::ostream& out) {
    const SimGrid grid = build_grid(cfg);
    std::vector<double> kappas = cfg.experiment.kappa_sweep;
    if (kappas.empty()) kappas.push_back(cfg.model.kappa);

    for (double kappa : kappas) {
        ExperimentConfig sweep_cfg = cfg;
        sweep_cfg.model.kappa = kappa;
        const SpdvModel model = build_model(sweep_cfg);
        validate_grid(model, grid);
        const std::string warning =
            admissibility_warning(sweep_cfg, model, cfg.experiment.p, grid.scheme);
        if (!warning.empty()) {
            if (!options.force)
                throw FellerGateFailed(warning + " (pass --force to run anyway)");
            out << "warning: " << warning << " (forced)\n";
        }
        StrongLadderOptions ladder_options;
        ladder_options.workers = options.workers;
        ladder_options.scheme = grid.scheme;
        ladder_options.max_mode = grid.max_mode;
        const auto ladder =
            strong_ladder(model, grid.horizon, cfg.experiment.p, cfg.experiment.levels,
                          cfg.experiment.base_n, grid.paths, grid.seed, ladder_options);

        std::string name = "strong_" + std::string(to_string(grid.scheme)) + "_p" +
                           fmt_num(cfg.experiment.p);
        if (kappas.size() > 1) name += "_k" + fmt_num(kappa);
        name += "_" + std::to_string(grid.seed) + ".csv";
        const fs::path file = fs::path(cfg.output.directory) / name;
        write_atomic(file, ladder_csv(sweep_cfg, ladder));

        out << "strong-order p=" << fmt_num(cfg.experiment.p) << " kappa=" << fmt_num(kappa)
            << " levels=" << ladder.levels.size();
        if (ladder.fit)
            out << " slope=" << fmt_num(ladder.fit->slope) << " (se "
                << fmt_num(ladder.fit->slope_se) << ")";
        else
            out << " slope=unresolved";
        out << "\n";
        out << "wrote " << file.string() << "\n";
    }
}

void run_weak_order(const ExperimentConfig& cfg, const RunOptions& options, std::ostream& out) {
    const SpdvModel model = build_model(cfg);
    const SimGrid grid = build_grid(cfg);
    validate_grid(model, grid);
    const PayoffSpec payoff = build_payoff(cfg);
    const std::string warning = admissibility_warning(cfg, model, 1.0, grid.scheme);
    if (!warning.empty()) {
        if (!options.force) throw FellerGateFailed(warning + " (pass --force to run anyway)");
        out << "warning: " << warning << " (forced)\n";
    }
    WeakLadderOptions ladder_options;
    ladder_options.workers = options.workers;
    ladder_options.scheme = grid.scheme;
    ladder_options.couple_within_level = cfg.experiment.couple_weak_levels;
    const auto ladder =
        weak_ladder(model, grid.horizon, payoff, cfg.experiment.levels, cfg.experiment.base_n,
                    grid.paths, grid.seed, grid.max_mode, ladder_options);

    const std::string mode_tag = grid.max_mode == MaxMode::BrownianBridge ? "bridge" : "nodes";
    const fs::path file = fs::path(cfg.output.directory) /
                          ("weak_" + mode_tag + "_" + std::string(to_string(grid.scheme)) + "_" +
                           payoff_file_tag(payoff) + "_" + std::to_string(grid.seed) + ".csv");
    write_atomic(file, ladder_csv(cfg, ladder));

    out << "weak-order payoff=" << to_string(payoff.kind) << " level=" << fmt_num(payoff.level)
        << " max=" << mode_tag;
    if (ladder.fit)
        out << " slope=" << fmt_num(ladder.fit->slope) << " (se " << fmt_num(ladder.fit->slope_se)
            << ")";
    else
        out << " slope=unresolved";
    out << "\n";
    out << "wrote " << file.string() << "\n";
}

}  // namespace

Subcommand parse_subcommand(const std::string& name) {
    if (name == "simulate") return Subcommand::Simulate;
    if (name == "price") return Subcommand::Price;
    if (name == "critical-time") return Subcommand::CriticalTime;
    if (name == "strong-order") return Subcommand::StrongOrder;
    if (name == "weak-order") return Subcommand::WeakOrder;
    throw ConfigError("unknown subcommand '" + name + "'");
}

void run(Subcommand command, const ExperimentConfig& config, const RunOptions& options,
         std::ostream& out) {
    switch (command) {
        case Subcommand::Simulate: run_simulate(config, options, out); break;
        case Subcommand::Price: run_price(config, options, out); break;
        case Subcommand::CriticalTime: run_critical_time(config, options, out); break;
        case Subcommand::StrongOrder: run_strong_order(config, options, out); break;
        case Subcommand::WeakOrder: run_weak_order(config, options, out); break;
    }
}

int run_catching(Subcommand command, const ExperimentConfig& config, const RunOptions& options,
                 std::ostream& out, std::ostream& err) {
    try {
        run(command, config, options, out);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FellerTooSmall& e) {
        err << "gate failure: " << e.what() << "\n";
        return kExitGate;
    } catch (const FellerGateFailed& e) {
        err << "gate failure: " << e.what() << "\n";
        return kExitGate;
    } catch (const POutOfRange& e) {
        err << "gate failure: " << e.what() << "\n";
        return kExitGate;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace spdv
