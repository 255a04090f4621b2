// config.cpp — scenario configuration parsing and validation.
#include "oqs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace oqs {

namespace {

std::complex<double> complex_from_json(const nlohmann::json& node) {
    if (!node.is_array() || node.size() != 2)
        throw std::invalid_argument(
            "config: complex values must be [re, im] pairs");
    return {node[0].get<double>(), node[1].get<double>()};
}

template <typename T>
void read_field(const nlohmann::json& doc, const char* key, T& target) {
    if (doc.contains(key)) target = doc.at(key).get<T>();
}

template <std::size_t N>
void read_array(const nlohmann::json& doc, const char* key,
                std::array<double, N>& target) {
    if (!doc.contains(key)) return;
    const nlohmann::json& node = doc.at(key);
    if (!node.is_array() || node.size() != N)
        throw std::invalid_argument(std::string("config: ") + key +
                                    " must have " + std::to_string(N) +
                                    " entries");
    for (std::size_t i = 0; i < N; ++i) target[i] = node[i].get<double>();
}

ChainParams params_from_json(const nlohmann::json& doc) {
    ChainParams p;
    read_field(doc, "omega0", p.omega0);
    read_field(doc, "g", p.g);
    read_field(doc, "lambda", p.lambda);
    read_field(doc, "omega_c", p.omega_c);
    read_field(doc, "temp_left", p.temp_left);
    read_field(doc, "temp_right", p.temp_right);
    return p;
}

nlohmann::json params_to_json(const ChainParams& p) {
    return {{"omega0", p.omega0},   {"g", p.g},
            {"lambda", p.lambda},   {"omega_c", p.omega_c},
            {"temp_left", p.temp_left}, {"temp_right", p.temp_right}};
}

QuadratureSpec quad_from_json(const nlohmann::json& doc) {
    QuadratureSpec q;
    read_field(doc, "rel_tol", q.rel_tol);
    read_field(doc, "abs_tol", q.abs_tol);
    read_field(doc, "max_panels", q.max_panels);
    read_field(doc, "pv_excision", q.pv_excision);
    return q;
}

nlohmann::json quad_to_json(const QuadratureSpec& q) {
    return {{"rel_tol", q.rel_tol},
            {"abs_tol", q.abs_tol},
            {"max_panels", q.max_panels},
            {"pv_excision", q.pv_excision}};
}

}  // namespace

void InitialStateConfig::validate() const {
    for (double n : occupations)
        if (!(n >= 0.0))
            throw std::invalid_argument(
                "InitialStateConfig: occupations must be >= 0");
    for (double z : squeeze)
        if (!std::isfinite(z))
            throw std::invalid_argument(
                "InitialStateConfig: squeeze entries must be finite");
}

void BathConfig::validate() const {
    if (modes_per_bath < 8)
        throw std::invalid_argument("BathConfig: modes_per_bath must be >= 8");
    if (!(omega_max_factor > 0.0))
        throw std::invalid_argument(
            "BathConfig: omega_max_factor must be > 0");
}

bool ScenarioConfig::has_approach(Approach approach) const {
    return std::find(approaches.begin(), approaches.end(), approach) !=
           approaches.end();
}

void ScenarioConfig::validate() const {
    params.validate();
    quad.validate();
    bath.validate();
    initial.validate();
    if (approaches.empty())
        throw std::invalid_argument(
            "ScenarioConfig: at least one approach required");
    for (std::size_t i = 0; i < approaches.size(); ++i)
        for (std::size_t j = i + 1; j < approaches.size(); ++j)
            if (approaches[i] == approaches[j])
                throw std::invalid_argument(
                    "ScenarioConfig: duplicate approach entry");
    const bool wants_tcg = has_approach(Approach::tcg);
    if (wants_tcg && delta_t_grid.empty())
        throw std::invalid_argument(
            "ScenarioConfig: tcg approach requires a delta_t grid");
    if (!wants_tcg && !delta_t_grid.empty())
        throw std::invalid_argument(
            "ScenarioConfig: delta_t grid given without the tcg approach");
    for (double dt : delta_t_grid)
        if (!(dt > 0.0))
            throw std::invalid_argument(
                "ScenarioConfig: delta_t grid entries must be > 0");
    if (!(horizon >= 0.0))
        throw std::invalid_argument("ScenarioConfig: horizon must be >= 0");
    if (!(sample_step > 0.0))
        throw std::invalid_argument("ScenarioConfig: sample_step must be > 0");
    if (!(integrator_tol > 0.0))
        throw std::invalid_argument(
            "ScenarioConfig: integrator_tol must be > 0");
    if (out_dir.empty())
        throw std::invalid_argument("ScenarioConfig: out_dir must be set");
}

Approach approach_from_name(const std::string& name) {
    if (name == "exact") return Approach::exact;
    if (name == "local") return Approach::local;
    if (name == "global") return Approach::global;
    if (name == "tcg") return Approach::tcg;
    throw std::invalid_argument("config: unknown approach \"" + name + "\"");
}

std::vector<double> default_delta_t_grid() {
    constexpr int count = 40;
    constexpr double lo = 1e-2;
    constexpr double hi = 1e4;
    std::vector<double> grid(count);
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) grid[i] = lo * std::exp(step * i);
    grid.back() = hi;
    return grid;
}

ScenarioConfig config_from_json(const nlohmann::json& doc) {
    ScenarioConfig config;
    if (doc.contains("params")) config.params = params_from_json(doc.at("params"));
    if (doc.contains("approaches")) {
        config.approaches.clear();
        for (const nlohmann::json& node : doc.at("approaches"))
            config.approaches.push_back(
                approach_from_name(node.get<std::string>()));
    }
    if (doc.contains("delta_t_grid"))
        config.delta_t_grid = doc.at("delta_t_grid").get<std::vector<double>>();
    else if (std::find(config.approaches.begin(), config.approaches.end(),
                       Approach::tcg) != config.approaches.end())
        config.delta_t_grid = default_delta_t_grid();
    if (doc.contains("bath")) {
        const nlohmann::json& node = doc.at("bath");
        read_field(node, "modes_per_bath", config.bath.modes_per_bath);
        read_field(node, "omega_max_factor", config.bath.omega_max_factor);
    }
    read_field(doc, "horizon", config.horizon);
    read_field(doc, "sample_step", config.sample_step);
    read_field(doc, "integrator_tol", config.integrator_tol);
    if (doc.contains("quadrature"))
        config.quad = quad_from_json(doc.at("quadrature"));
    if (doc.contains("initial")) {
        const nlohmann::json& node = doc.at("initial");
        read_array(node, "occupations", config.initial.occupations);
        read_array(node, "squeeze", config.initial.squeeze);
        if (node.contains("displacement")) {
            const nlohmann::json& disp = node.at("displacement");
            if (!disp.is_array() || disp.size() != 3)
                throw std::invalid_argument(
                    "config: displacement must have 3 entries");
            for (int i = 0; i < 3; ++i)
                config.initial.displacement[i] = complex_from_json(disp[i]);
        }
    }
    read_field(doc, "out_dir", config.out_dir);
    read_field(doc, "seed", config.seed);
    return config;
}

nlohmann::json config_to_json(const ScenarioConfig& config) {
    nlohmann::json doc;
    doc["params"] = params_to_json(config.params);
    nlohmann::json approaches = nlohmann::json::array();
    for (Approach approach : config.approaches)
        approaches.push_back(approach_name(approach));
    doc["approaches"] = std::move(approaches);
    doc["delta_t_grid"] = config.delta_t_grid;
    doc["bath"] = {{"modes_per_bath", config.bath.modes_per_bath},
                   {"omega_max_factor", config.bath.omega_max_factor}};
    doc["horizon"] = config.horizon;
    doc["sample_step"] = config.sample_step;
    doc["integrator_tol"] = config.integrator_tol;
    doc["quadrature"] = quad_to_json(config.quad);
    nlohmann::json displacement = nlohmann::json::array();
    for (const std::complex<double>& z : config.initial.displacement)
        displacement.push_back({z.real(), z.imag()});
    doc["initial"] = {{"occupations", config.initial.occupations},
                      {"squeeze", config.initial.squeeze},
                      {"displacement", std::move(displacement)}};
    doc["out_dir"] = config.out_dir;
    doc["seed"] = config.seed;
    return doc;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("load_config: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& err) {
        throw std::invalid_argument("load_config: " + std::string(err.what()));
    }
    ScenarioConfig config = config_from_json(doc);
    config.validate();
    return config;
}

CovarianceState initial_state(const ScenarioConfig& config) {
    CovarianceState state = CovarianceState::vacuum(Basis::site);
    for (int i = 0; i < 3; ++i) {
        const double scale = 2.0 * config.initial.occupations[i] + 1.0;
        const double zeta = config.initial.squeeze[i];
        state.c(i, i) = scale * std::cosh(2.0 * zeta);
        state.c(3 + i, 3 + i) = state.c(i, i);
        state.c(i, 3 + i) = -scale * std::sinh(2.0 * zeta);
        state.c(3 + i, i) = std::conj(state.c(i, 3 + i));
        state.d(i) = config.initial.displacement[i];
        state.d(3 + i) = std::conj(state.d(i));
    }
    state.validate();
    return state;
}

}  // namespace oqs
