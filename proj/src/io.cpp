// io.cpp — export helpers shared by the CLI subcommands.
#include "oqs/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace oqs {

namespace {

void append_complex(nlohmann::json& target, const std::complex<double>& z) {
    target.push_back({z.real(), z.imag()});
}

nlohmann::json matrix_to_json(const Eigen::Matrix3cd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < 3; ++j) append_complex(row, m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const std::to_chars_result res =
        std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<CovarianceState>& traj,
                          const ChainParams& params) {
    std::ofstream out = open_output(path);
    out << "t";
    for (int i = 1; i <= 6; ++i)
        for (int j = i; j <= 6; ++j)
            out << ",re_c_" << i << "_" << j << ",im_c_" << i << "_" << j;
    for (int i = 1; i <= 3; ++i) out << ",re_d_" << i << ",im_d_" << i;
    out << ",n2,j12,j23\n";
    for (const CovarianceState& raw : traj) {
        const CovarianceState state =
            raw.basis == Basis::site ? raw
                                     : to_site_basis(raw, normal_modes(params));
        out << format_double(state.t);
        for (int i = 0; i < 6; ++i)
            for (int j = i; j < 6; ++j)
                out << "," << format_double(state.c(i, j).real()) << ","
                    << format_double(state.c(i, j).imag());
        for (int i = 0; i < 3; ++i)
            out << "," << format_double(state.d(i).real()) << ","
                << format_double(state.d(i).imag());
        out << "," << format_double(occupation(state, 2)) << ","
            << format_double(excitation_current(state, 1, 2)) << ","
            << format_double(excitation_current(state, 2, 3)) << "\n";
    }
}

void write_transport_csv(const std::string& path,
                         const std::vector<EnergyTransportReport>& rows) {
    std::ofstream out = open_output(path);
    out << "approach,delta_t,t,j12,j23,q_left,q_right,n2_rate,residual\n";
    for (const EnergyTransportReport& row : rows) {
        out << row.approach << ",";
        if (row.delta_t > 0.0) out << format_double(row.delta_t);
        out << "," << format_double(row.t) << "," << format_double(row.j12)
            << "," << format_double(row.j23) << ","
            << format_double(row.q_left) << "," << format_double(row.q_right)
            << "," << format_double(row.n2_rate) << ","
            << format_double(row.residual) << "\n";
    }
}

void write_spatial_csv(const std::string& path, const SpatialField& field) {
    std::ofstream out = open_output(path);
    out << "x,density,j_unitary,j_dissipative,q_term,p_term\n";
    const bool currents = !field.j_unitary.empty();
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        out << format_double(field.grid[i]) << ","
            << format_double(field.density[i]);
        if (currents)
            out << "," << format_double(field.j_unitary[i]) << ","
                << format_double(field.j_dissipative[i]) << ","
                << format_double(field.q_term[i]) << ","
                << format_double(field.p_term[i]);
        else
            out << ",0,0,0,0";
        out << "\n";
    }
}

nlohmann::json coefficients_to_json(const GeneratorCoefficients& coeffs) {
    nlohmann::json doc;
    doc["label"] = coeffs.label;
    doc["basis"] = coeffs.basis == Basis::site ? "site" : "normal";
    doc["h_eff"] = matrix_to_json(coeffs.h_eff);
    doc["gamma_plus"] = matrix_to_json(coeffs.gamma_plus);
    doc["gamma_minus"] = matrix_to_json(coeffs.gamma_minus);
    doc["calibration"] = tcg_rate_calibration;
    if (coeffs.delta_t > 0.0) doc["delta_t"] = coeffs.delta_t;
    return doc;
}

void write_coefficients_json(const std::string& path,
                             const GeneratorCoefficients& coeffs) {
    std::ofstream out = open_output(path);
    out << coefficients_to_json(coeffs).dump(2) << "\n";
}

nlohmann::json state_to_json(const CovarianceState& state) {
    nlohmann::json doc;
    doc["basis"] = state.basis == Basis::site ? "site" : "normal";
    doc["t"] = state.t;
    nlohmann::json c = nlohmann::json::array();
    for (int i = 0; i < 6; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < 6; ++j) append_complex(row, state.c(i, j));
        c.push_back(std::move(row));
    }
    doc["c"] = std::move(c);
    nlohmann::json d = nlohmann::json::array();
    for (int i = 0; i < 6; ++i) append_complex(d, state.d(i));
    doc["d"] = std::move(d);
    return doc;
}

void write_state_json(const std::string& path, const CovarianceState& state) {
    std::ofstream out = open_output(path);
    out << state_to_json(state).dump(2) << "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out = open_output(path);
    out << content;
}

}  // namespace oqs
