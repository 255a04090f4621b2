// io.hpp — CSV and JSON export with byte-stable numeric formatting.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oqs/dynamics.hpp"
#include "oqs/generators.hpp"
#include "oqs/transport.hpp"

namespace oqs {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Site-basis rows: t, Re/Im of the 21 upper-triangle entries of c, Re/Im of
// the three independent displacement entries, then n2, j12, j23.
void write_trajectory_csv(const std::string& path,
                          const std::vector<CovarianceState>& traj,
                          const ChainParams& params);

// Columns approach, delta_t (empty when not applicable), t, j12, j23,
// q_left, q_right, n2_rate, residual.
void write_transport_csv(const std::string& path,
                         const std::vector<EnergyTransportReport>& rows);

// Columns x, density, j_unitary, j_dissipative, q_term, p_term.
void write_spatial_csv(const std::string& path, const SpatialField& field);

nlohmann::json coefficients_to_json(const GeneratorCoefficients& coeffs);
void write_coefficients_json(const std::string& path,
                             const GeneratorCoefficients& coeffs);

nlohmann::json state_to_json(const CovarianceState& state);
void write_state_json(const std::string& path, const CovarianceState& state);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace oqs
