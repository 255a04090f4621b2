// oqs_chain.cpp — command-line front end for the three-oscillator chain
// simulator.
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "oqs/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Reduced dynamics and transport for a three-oscillator chain "
                 "between two thermal baths"};
    app.require_subcommand(1);

    oqs::CliOptions options;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", options.config_path,
                        "JSON scenario configuration")
            ->required();
        sub->add_option("--out", options.out_dir,
                        "output directory (overrides the config)");
        sub->add_option("--seed", options.seed, "random seed override")
            ->each([&](const std::string&) { options.seed_set = true; });
        sub->add_option("--threads", options.threads,
                        "worker threads (default: OQS_CHAIN_THREADS or all "
                        "cores)");
        return sub;
    };

    add_common(app.add_subcommand(
        "coeffs", "write generator coefficient dumps per approach"));
    add_common(app.add_subcommand(
        "evolve", "integrate trajectories and export transport tables"));
    add_common(app.add_subcommand(
        "sweep-dt", "steady sink/source terms over the delta_t grid"));
    CLI::App* check = add_common(
        app.add_subcommand("check", "run the invariant suite"));
    check->add_flag("--debug-corrupt-gamma", options.debug_corrupt_gamma,
                    "plant a negative rate to exercise the failure path");

    CLI11_PARSE(app, argc, argv);

    if (options.threads == 0) {
        if (const char* env = std::getenv("OQS_CHAIN_THREADS"))
            options.threads = std::atoi(env);
    }
    return oqs::run_cli(app.get_subcommands().front()->get_name(), options);
}
