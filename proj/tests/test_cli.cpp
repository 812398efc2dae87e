#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "spdv/errors.hpp"
#include "spdv/run.hpp"

using namespace spdv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("spdv_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& file) {
    std::ifstream in(file);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("critical-time subcommand reproduces the reported table") {
    TempDir dir;
    ExperimentConfig cfg;
    cfg.experiment.sigma_max = 1.437;
    cfg.experiment.c_sigma_x = 0.307;
    cfg.experiment.c_sigma_m = 0.307;
    cfg.experiment.p_values = {1.0, 2.0};
    cfg.output.directory = dir.path.string();

    std::ostringstream out, err;
    const int status =
        run_catching(Subcommand::CriticalTime, cfg, {}, out, err);
    CHECK(status == kExitOk);
    CHECK(out.str().find("132.5") != std::string::npos);
    CHECK(out.str().find("12.5") != std::string::npos);

    const fs::path csv = dir.path / "critical_time_fte_42.csv";
    REQUIRE(fs::exists(csv));
    const std::string body = slurp(csv);
    CHECK(body.find("p,T_x,T_S,T_star,q_argmax,admissible") != std::string::npos);
    CHECK(body.find("# config ") != std::string::npos);
}

TEST_CASE("config errors exit with code 2 and name the field") {
    ExperimentConfig cfg;
    cfg.model.leverage.tag = "bogus";
    std::ostringstream out, err;
    CHECK(run_catching(Subcommand::Simulate, cfg, {}, out, err) == kExitConfig);
    CHECK(err.str().find("leverage") != std::string::npos);
}

TEST_CASE("BEM structural gate exits with code 3") {
    ExperimentConfig cfg;
    cfg.model.kappa = 1.0;   // 4*k*theta = 0.08 <= xi^2 = 0.16
    cfg.model.xi = 0.4;
    cfg.grid.scheme = "bem";
    cfg.grid.paths = 10;
    cfg.grid.steps = 4;
    std::ostringstream out, err;
    CHECK(run_catching(Subcommand::Simulate, cfg, {}, out, err) == kExitGate);
    CHECK(err.str().find("4*kappa*theta") != std::string::npos);
}

TEST_CASE("inadmissible convergence studies require --force") {
    TempDir dir;
    ExperimentConfig cfg;
    cfg.model.kappa = 0.25;  // nu = 0.25, far below nu*
    cfg.grid.paths = 500;
    cfg.experiment.levels = 3;
    cfg.experiment.base_n = 8;
    cfg.output.directory = dir.path.string();

    std::ostringstream out, err;
    CHECK(run_catching(Subcommand::StrongOrder, cfg, {}, out, err) == kExitGate);
    CHECK(err.str().find("--force") != std::string::npos);

    std::ostringstream out2, err2;
    RunOptions forced;
    forced.force = true;
    CHECK(run_catching(Subcommand::StrongOrder, cfg, forced, out2, err2) == kExitOk);
    CHECK(out2.str().find("warning") != std::string::npos);
    CHECK(fs::exists(dir.path / "strong_fte_p1_42.csv"));
}

TEST_CASE("ladder CSVs carry the level table and the slope summary") {
    TempDir dir;
    ExperimentConfig cfg;
    cfg.grid.paths = 4000;
    cfg.experiment.levels = 3;
    cfg.experiment.base_n = 8;
    cfg.output.directory = dir.path.string();

    std::ostringstream out, err;
    REQUIRE(run_catching(Subcommand::StrongOrder, cfg, {}, out, err) == kExitOk);
    const std::string body = slurp(dir.path / "strong_fte_p1_42.csv");
    CHECK(body.find("N,error,stderr,paths,resolved") != std::string::npos);
    CHECK(body.find("slope,slope_se,levels_used") != std::string::npos);
    CHECK(body.find("\n8,") != std::string::npos);
    CHECK(body.find("\n16,") != std::string::npos);
    CHECK(body.find("\n32,") != std::string::npos);
}

TEST_CASE("identical config and seed reproduce byte-identical CSV bodies") {
    TempDir dir_a, dir_b;
    ExperimentConfig cfg;
    cfg.grid.paths = 2000;
    cfg.experiment.levels = 3;
    cfg.experiment.base_n = 8;

    std::ostringstream out, err;
    cfg.output.directory = dir_a.path.string();
    REQUIRE(run_catching(Subcommand::StrongOrder, cfg, {}, out, err) == kExitOk);
    cfg.output.directory = dir_b.path.string();
    REQUIRE(run_catching(Subcommand::StrongOrder, cfg, {}, out, err) == kExitOk);
    CHECK(slurp(dir_a.path / "strong_fte_p1_42.csv") ==
          slurp(dir_b.path / "strong_fte_p1_42.csv"));
}

TEST_CASE("kappa sweeps emit one ladder per value") {
    TempDir dir;
    ExperimentConfig cfg;
    cfg.grid.paths = 500;
    cfg.experiment.levels = 3;
    cfg.experiment.base_n = 8;
    cfg.experiment.kappa_sweep = {4.0, 8.0};
    cfg.output.directory = dir.path.string();
    std::ostringstream out, err;
    REQUIRE(run_catching(Subcommand::StrongOrder, cfg, {}, out, err) == kExitOk);
    CHECK(fs::exists(dir.path / "strong_fte_p1_k4_42.csv"));
    CHECK(fs::exists(dir.path / "strong_fte_p1_k8_42.csv"));
}

TEST_CASE("weak-order subcommand writes a mode-tagged ladder") {
    TempDir dir;
    ExperimentConfig cfg;
    cfg.model.leverage.tag = "arctan_max";
    cfg.grid.paths = 4000;
    cfg.grid.max_mode = "bridge";
    cfg.experiment.levels = 3;
    cfg.experiment.base_n = 8;
    cfg.experiment.payoff = "european_call";
    cfg.experiment.payoff_level = 0.9;
    cfg.output.directory = dir.path.string();
    std::ostringstream out, err;
    REQUIRE(run_catching(Subcommand::WeakOrder, cfg, {}, out, err) == kExitOk);
    CHECK(fs::exists(dir.path / "weak_bridge_fte_european_call_0.9_42.csv"));
}

TEST_CASE("simulate with dump writes the per-node path table") {
    TempDir dir;
    ExperimentConfig cfg;
    cfg.grid.paths = 3;
    cfg.grid.steps = 5;
    cfg.output.directory = dir.path.string();
    cfg.output.dump_paths = true;
    std::ostringstream out, err;
    REQUIRE(run_catching(Subcommand::Simulate, cfg, {}, out, err) == kExitOk);
    const std::string body = slurp(dir.path / "paths_fte_42.csv");
    CHECK(body.find("path,step,t,x,m,v_bar") != std::string::npos);
    // 3 paths x 6 nodes of data rows.
    int rows = 0;
    for (char c : body)
        if (c == '\n') ++rows;
    CHECK(rows >= 3 * 6 + 4);
}

TEST_CASE("price subcommand emits the summary line") {
    TempDir dir;
    ExperimentConfig cfg;
    cfg.grid.paths = 2000;
    cfg.grid.steps = 8;
    cfg.experiment.payoff = "no_touch_up";
    cfg.experiment.payoff_level = 0.8;  // below s0: knocked out surely
    cfg.output.directory = dir.path.string();
    std::ostringstream out, err;
    REQUIRE(run_catching(Subcommand::Price, cfg, {}, out, err) == kExitOk);
    CHECK(out.str().find("no_touch_up,0.8,0,0,2000") != std::string::npos);
    CHECK(fs::exists(dir.path / "price_fte_no_touch_up_0.8_42.csv"));
}

TEST_CASE("subcommand names parse") {
    CHECK(parse_subcommand("simulate") == Subcommand::Simulate);
    CHECK(parse_subcommand("critical-time") == Subcommand::CriticalTime);
    CHECK_THROWS_AS(parse_subcommand("calibrate"), ConfigError);
}
