#pragma once

#include <iosfwd>
#include <string>

#include "spdv/config.hpp"

namespace spdv {

inline constexpr const char* kVersion = "0.1.0";

enum class Subcommand { Simulate, Price, CriticalTime, StrongOrder, WeakOrder };

/// Parse a subcommand name; throws ConfigError on an unknown name.
Subcommand parse_subcommand(const std::string& name);

struct RunOptions {
    bool force = false;  // proceed past admissibility warnings
    int workers = 0;     // 0 = hardware concurrency
};

// Exit codes shared by run_catching and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitGate = 3;
inline constexpr int kExitNumerical = 4;

/// Execute a subcommand: validate gates, run the experiment, write artifact
/// CSVs atomically under config.output.directory and print a summary table.
/// Throws ConfigError / FellerTooSmall / FellerGateFailed / NumericalError.
void run(Subcommand command, const ExperimentConfig& config, const RunOptions& options,
         std::ostream& out);

/// Like run(), but maps exceptions to exit codes (2 config, 3 gate,
/// 4 numerical) and prints the diagnostic to err.
int run_catching(Subcommand command, const ExperimentConfig& config, const RunOptions& options,
                 std::ostream& out, std::ostream& err);

}  // namespace spdv
