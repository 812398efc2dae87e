#include "spdv/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spdv/errors.hpp"

namespace spdv {

namespace {

using nlohmann::json;

// Strict field reader: present-but-wrong-type and unknown keys both fail with
// the offending dotted path in the message.
template <typename T>
void read_field(const json& block, const std::string& scope, const char* key, T& out) {
    if (!block.contains(key)) return;
    try {
        out = block.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + scope + "." + key + "' has the wrong type");
    }
}

void check_known_keys(const json& block, const std::string& scope,
                      std::initializer_list<const char*> known) {
    for (const auto& [key, value] : block.items()) {
        bool found = false;
        for (const char* k : known)
            if (key == k) {
                found = true;
                break;
            }
        if (!found) throw ConfigError("unknown config field '" + scope + "." + key + "'");
    }
}

json slice_to_json(const SviSliceParams& p) {
    return json{{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}, {"e", p.e}};
}

void slice_from_json(const json& block, const std::string& scope, SviSliceParams& p) {
    check_known_keys(block, scope, {"a", "b", "c", "d", "e"});
    read_field(block, scope, "a", p.a);
    read_field(block, scope, "b", p.b);
    read_field(block, scope, "c", p.c);
    read_field(block, scope, "d", p.d);
    read_field(block, scope, "e", p.e);
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    check_known_keys(doc, "", {"model", "grid", "experiment", "output"});

    ExperimentConfig cfg;
    if (doc.contains("model")) {
        const auto& m = doc["model"];
        check_known_keys(m, "model",
                         {"s0", "rho", "v0", "kappa", "theta", "xi", "drift", "leverage"});
        read_field(m, "model", "s0", cfg.model.s0);
        read_field(m, "model", "rho", cfg.model.rho);
        read_field(m, "model", "v0", cfg.model.v0);
        read_field(m, "model", "kappa", cfg.model.kappa);
        read_field(m, "model", "theta", cfg.model.theta);
        read_field(m, "model", "xi", cfg.model.xi);
        if (m.contains("drift")) {
            const auto& d = m["drift"];
            check_known_keys(d, "model.drift", {"tag", "rate", "jump_times", "rates"});
            read_field(d, "model.drift", "tag", cfg.model.drift.tag);
            read_field(d, "model.drift", "rate", cfg.model.drift.rate);
            read_field(d, "model.drift", "jump_times", cfg.model.drift.jump_times);
            read_field(d, "model.drift", "rates", cfg.model.drift.rates);
        }
        if (m.contains("leverage")) {
            const auto& l = m["leverage"];
            check_known_keys(l, "model.leverage",
                             {"tag", "value", "svi_spot", "svi_max", "s_min", "s_max"});
            read_field(l, "model.leverage", "tag", cfg.model.leverage.tag);
            read_field(l, "model.leverage", "value", cfg.model.leverage.constant_value);
            if (l.contains("svi_spot"))
                slice_from_json(l["svi_spot"], "model.leverage.svi_spot",
                                cfg.model.leverage.svi_spot);
            if (l.contains("svi_max"))
                slice_from_json(l["svi_max"], "model.leverage.svi_max", cfg.model.leverage.svi_max);
            if (l.contains("s_min")) {
                double v = 0.0;
                read_field(l, "model.leverage", "s_min", v);
                cfg.model.leverage.s_min = v;
            }
            if (l.contains("s_max")) {
                double v = 0.0;
                read_field(l, "model.leverage", "s_max", v);
                cfg.model.leverage.s_max = v;
            }
        }
    }
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        check_known_keys(g, "grid", {"horizon", "steps", "paths", "seed", "scheme", "max_mode"});
        read_field(g, "grid", "horizon", cfg.grid.horizon);
        read_field(g, "grid", "steps", cfg.grid.steps);
        read_field(g, "grid", "paths", cfg.grid.paths);
        read_field(g, "grid", "seed", cfg.grid.seed);
        read_field(g, "grid", "scheme", cfg.grid.scheme);
        read_field(g, "grid", "max_mode", cfg.grid.max_mode);
    }
    if (doc.contains("experiment")) {
        const auto& e = doc["experiment"];
        check_known_keys(e, "experiment",
                         {"payoff", "payoff_level", "discount_rate", "p", "levels", "base_n",
                          "kappa_sweep", "couple_weak_levels", "p_values", "sigma_max",
                          "c_sigma_x", "c_sigma_m"});
        read_field(e, "experiment", "payoff", cfg.experiment.payoff);
        read_field(e, "experiment", "payoff_level", cfg.experiment.payoff_level);
        read_field(e, "experiment", "discount_rate", cfg.experiment.discount_rate);
        read_field(e, "experiment", "p", cfg.experiment.p);
        read_field(e, "experiment", "levels", cfg.experiment.levels);
        read_field(e, "experiment", "base_n", cfg.experiment.base_n);
        read_field(e, "experiment", "kappa_sweep", cfg.experiment.kappa_sweep);
        read_field(e, "experiment", "couple_weak_levels", cfg.experiment.couple_weak_levels);
        read_field(e, "experiment", "p_values", cfg.experiment.p_values);
        for (const char* key : {"sigma_max", "c_sigma_x", "c_sigma_m"}) {
            if (!e.contains(key)) continue;
            double v = 0.0;
            read_field(e, "experiment", key, v);
            if (std::string(key) == "sigma_max") cfg.experiment.sigma_max = v;
            if (std::string(key) == "c_sigma_x") cfg.experiment.c_sigma_x = v;
            if (std::string(key) == "c_sigma_m") cfg.experiment.c_sigma_m = v;
        }
    }
    if (doc.contains("output")) {
        const auto& o = doc["output"];
        check_known_keys(o, "output", {"directory", "dump_paths", "stamp"});
        read_field(o, "output", "directory", cfg.output.directory);
        read_field(o, "output", "dump_paths", cfg.output.dump_paths);
        read_field(o, "output", "stamp", cfg.output.stamp);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json doc;
    doc["model"] = {
        {"s0", cfg.model.s0},       {"rho", cfg.model.rho},   {"v0", cfg.model.v0},
        {"kappa", cfg.model.kappa}, {"theta", cfg.model.theta}, {"xi", cfg.model.xi},
    };
    json drift{{"tag", cfg.model.drift.tag}};
    if (cfg.model.drift.tag == "constant") drift["rate"] = cfg.model.drift.rate;
    if (cfg.model.drift.tag == "piecewise") {
        drift["jump_times"] = cfg.model.drift.jump_times;
        drift["rates"] = cfg.model.drift.rates;
    }
    doc["model"]["drift"] = drift;
    json leverage{{"tag", cfg.model.leverage.tag}};
    if (cfg.model.leverage.tag == "constant")
        leverage["value"] = cfg.model.leverage.constant_value;
    if (cfg.model.leverage.tag == "svi") {
        leverage["svi_spot"] = slice_to_json(cfg.model.leverage.svi_spot);
        leverage["svi_max"] = slice_to_json(cfg.model.leverage.svi_max);
    }
    if (cfg.model.leverage.s_min) leverage["s_min"] = *cfg.model.leverage.s_min;
    if (cfg.model.leverage.s_max) leverage["s_max"] = *cfg.model.leverage.s_max;
    doc["model"]["leverage"] = leverage;
    doc["grid"] = {
        {"horizon", cfg.grid.horizon}, {"steps", cfg.grid.steps},
        {"paths", cfg.grid.paths},     {"seed", cfg.grid.seed},
        {"scheme", cfg.grid.scheme},   {"max_mode", cfg.grid.max_mode},
    };
    doc["experiment"] = {
        {"payoff", cfg.experiment.payoff},
        {"payoff_level", cfg.experiment.payoff_level},
        {"discount_rate", cfg.experiment.discount_rate},
        {"p", cfg.experiment.p},
        {"levels", cfg.experiment.levels},
        {"base_n", cfg.experiment.base_n},
        {"kappa_sweep", cfg.experiment.kappa_sweep},
        {"couple_weak_levels", cfg.experiment.couple_weak_levels},
        {"p_values", cfg.experiment.p_values},
    };
    if (cfg.experiment.sigma_max) doc["experiment"]["sigma_max"] = *cfg.experiment.sigma_max;
    if (cfg.experiment.c_sigma_x) doc["experiment"]["c_sigma_x"] = *cfg.experiment.c_sigma_x;
    if (cfg.experiment.c_sigma_m) doc["experiment"]["c_sigma_m"] = *cfg.experiment.c_sigma_m;
    doc["output"] = {
        {"directory", cfg.output.directory},
        {"dump_paths", cfg.output.dump_paths},
        {"stamp", cfg.output.stamp},
    };
    return doc.dump(2);
}

SpdvModel build_model(const ExperimentConfig& cfg) {
    CirParams cir = [&] {
        try {
            return CirParams(cfg.model.v0, cfg.model.kappa, cfg.model.theta, cfg.model.xi);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
    }();

    DriftFunction drift = DriftFunction::zero();
    if (cfg.model.drift.tag == "constant") {
        drift = DriftFunction::constant(cfg.model.drift.rate);
    } else if (cfg.model.drift.tag == "piecewise") {
        drift = DriftFunction::piecewise_in_time(cfg.model.drift.jump_times,
                                                 cfg.model.drift.rates);
    } else if (cfg.model.drift.tag != "zero") {
        throw ConfigError("model.drift.tag must be zero, constant or piecewise");
    }

    LeverageFunction leverage;
    const auto& lev = cfg.model.leverage;
    if (lev.tag == "constant") {
        leverage = constant_leverage(lev.constant_value);
    } else if (lev.tag == "svi") {
        const double band = 3.0 * std::sqrt(cfg.model.v0 * cfg.grid.horizon);
        const double s_min = lev.s_min.value_or(cfg.model.s0 * std::exp(-band));
        const double s_max = lev.s_max.value_or(cfg.model.s0 * std::exp(band));
        leverage = svi_leverage({lev.svi_spot, lev.svi_max}, cfg.model.s0, s_min, s_max);
    } else if (lev.tag == "arctan_max") {
        leverage = arctan_max_leverage(cfg.model.s0);
    } else {
        throw ConfigError("model.leverage.tag must be constant, svi or arctan_max");
    }

    try {
        return SpdvModel(cfg.model.s0, cfg.model.rho, cir, std::move(drift), std::move(leverage));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

SimGrid build_grid(const ExperimentConfig& cfg) {
    SimGrid grid;
    grid.horizon = cfg.grid.horizon;
    grid.steps = cfg.grid.steps;
    grid.paths = cfg.grid.paths;
    grid.seed = cfg.grid.seed;
    if (cfg.grid.scheme == "fte") {
        grid.scheme = VarianceScheme::Fte;
    } else if (cfg.grid.scheme == "bem") {
        grid.scheme = VarianceScheme::Bem;
    } else {
        throw ConfigError("grid.scheme must be fte or bem");
    }
    if (cfg.grid.max_mode == "nodes") {
        grid.max_mode = MaxMode::PiecewiseLinearNodes;
    } else if (cfg.grid.max_mode == "bridge") {
        grid.max_mode = MaxMode::BrownianBridge;
    } else {
        throw ConfigError("grid.max_mode must be nodes or bridge");
    }
    if (!(grid.horizon > 0.0)) throw ConfigError("grid.horizon must be positive");
    if (grid.steps < 1) throw ConfigError("grid.steps must be >= 1");
    if (grid.paths < 1) throw ConfigError("grid.paths must be >= 1");
    return grid;
}

PayoffSpec build_payoff(const ExperimentConfig& cfg) {
    PayoffSpec payoff;
    const auto& e = cfg.experiment;
    if (e.payoff == "european_call") {
        payoff.kind = PayoffKind::EuropeanCall;
    } else if (e.payoff == "european_put") {
        payoff.kind = PayoffKind::EuropeanPut;
    } else if (e.payoff == "no_touch_up") {
        payoff.kind = PayoffKind::NoTouchUp;
    } else {
        throw ConfigError("experiment.payoff must be european_call, european_put or no_touch_up");
    }
    payoff.level = e.payoff_level;
    payoff.discount_rate = e.discount_rate;
    if (!(payoff.level > 0.0)) throw ConfigError("experiment.payoff_level must be positive");
    return payoff;
}

std::string config_digest(const ExperimentConfig& cfg) {
    json doc = json::parse(serialize_config(cfg));
    const std::string canonical = json{{"model", doc["model"]}, {"grid", doc["grid"]}}.dump();
    return hex64(fnv1a(canonical));
}

std::string config_digest(const SpdvModel& model, const SimGrid& grid) {
    json doc;
    doc["model"] = {{"s0", model.s0},
                    {"rho", model.rho},
                    {"v0", model.cir.v0},
                    {"kappa", model.cir.kappa},
                    {"theta", model.cir.theta},
                    {"xi", model.cir.xi},
                    {"leverage_tag", static_cast<int>(model.leverage.descriptor().tag)},
                    {"drift_tag", static_cast<int>(model.drift.tag())}};
    doc["grid"] = {{"horizon", grid.horizon},   {"steps", grid.steps},
                   {"paths", grid.paths},       {"seed", grid.seed},
                   {"scheme", to_string(grid.scheme)}, {"max_mode", to_string(grid.max_mode)}};
    return hex64(fnv1a(doc.dump()));
}

}  // namespace spdv
