// config.hpp — scenario configuration: JSON schema, validation, and the
// initial-state constructor shared by all CLI subcommands.
#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "oqs/chain_params.hpp"
#include "oqs/dynamics.hpp"
#include "oqs/quadrature.hpp"
#include "oqs/transport.hpp"

namespace oqs {

// Gaussian initial state per site: thermal occupation, single-mode squeeze
// parameter, and a coherent displacement.
struct InitialStateConfig {
    std::array<double, 3> occupations{0.0, 0.0, 0.0};
    std::array<double, 3> squeeze{0.0, 0.0, 0.0};
    std::array<std::complex<double>, 3> displacement{};

    bool operator==(const InitialStateConfig&) const = default;

    void validate() const;
};

// Discretization settings for the exact star-model reference.
struct BathConfig {
    int modes_per_bath = 512;
    double omega_max_factor = 12.0;  // grid spans [0, factor * omega_c]

    bool operator==(const BathConfig&) const = default;

    void validate() const;
};

struct ScenarioConfig {
    ChainParams params{};
    std::vector<Approach> approaches{Approach::local};
    std::vector<double> delta_t_grid{};  // coarse-graining windows for tcg
    BathConfig bath{};
    double horizon = 50.0;        // integration end time
    double sample_step = 0.5;     // trajectory sampling interval
    double integrator_tol = 1e-10;
    QuadratureSpec quad{};
    InitialStateConfig initial{};
    std::string out_dir = "out";
    unsigned long long seed = 12345;

    bool operator==(const ScenarioConfig&) const = default;

    bool has_approach(Approach approach) const;
    void validate() const;
};

Approach approach_from_name(const std::string& name);

// 40 log-spaced windows in [1e-2, 1e4], the default tcg sweep grid.
std::vector<double> default_delta_t_grid();

ScenarioConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ScenarioConfig& config);

// Parse a JSON config file.  A missing delta_t grid is filled with the
// default grid when tcg is requested.
ScenarioConfig load_config(const std::string& path);

// Site-basis Gaussian state with per-site diagonal moments
// C1_ii = (2 n_i + 1) cosh(2 zeta_i), C2_ii = -(2 n_i + 1) sinh(2 zeta_i)
// and the configured displacement.
CovarianceState initial_state(const ScenarioConfig& config);

}  // namespace oqs
