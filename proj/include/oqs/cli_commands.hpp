// cli_commands.hpp — subcommand implementations behind the oqs-chain binary.
#pragma once

#include <string>

#include "oqs/config.hpp"

namespace oqs {

struct CliOptions {
    std::string config_path;
    std::string out_dir;  // overrides the config value when non-empty
    unsigned long long seed = 0;
    bool seed_set = false;
    int threads = 0;  // 0 = hardware concurrency
    bool debug_corrupt_gamma = false;
};

// Coefficient dumps for every requested approach and window.
int cmd_coeffs(const ScenarioConfig& config);

// Trajectories, combined transport table, final spatial fields and states.
int cmd_evolve(const ScenarioConfig& config);

// Steady-state sink/source terms over the delta_t grid plus the constant
// secular-generator reference rows.
int cmd_sweep_dt(const ScenarioConfig& config, int threads);

// Invariant suite with a machine-readable pass/fail report.
int cmd_check(const ScenarioConfig& config, bool debug_corrupt_gamma);

// Load + validate the config, apply option overrides, create the output
// directory, and dispatch.  Exit codes: 0 success, 2 config error, 3 numeric
// failure, 4 check failure.
int run_cli(const std::string& command, const CliOptions& options);

}  // namespace oqs
