// chain_params.cpp — bath functions and normal-mode construction.
#include "oqs/chain_params.hpp"

namespace oqs {

NormalModes normal_modes(const ChainParams& params) {
    params.validate();
    NormalModes nm;
    nm.epsilon = {params.omega0 - sqrt2 * params.g, params.omega0,
                  params.omega0 + sqrt2 * params.g};
    nm.bogolubov << 0.5, -0.5 * sqrt2, 0.5,
                    0.5 * sqrt2, 0.0, -0.5 * sqrt2,
                    0.5, 0.5 * sqrt2, 0.5;
    return nm;
}

Eigen::Matrix3d site_hamiltonian(const ChainParams& params) {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    h.diagonal().setConstant(params.omega0);
    h(0, 1) = h(1, 0) = h(1, 2) = h(2, 1) = params.g;
    return h;
}

double spectral_density(double omega, double omega_c) {
    return omega * std::exp(-omega / omega_c);
}

double spectral_density_even(double omega, double omega_c) {
    return omega * std::exp(-std::abs(omega) / omega_c);
}

double mean_photon(double omega, double temperature) {
    if (temperature == 0.0) return omega > 0.0 ? 0.0 : -1.0;
    if (omega == 0.0)
        throw std::domain_error("mean_photon: omega = 0 diverges; use thermal_kernel");
    return 1.0 / std::expm1(omega / temperature);
}

double thermal_kernel(double omega, double temperature, double omega_c,
                      bool even) {
    const double cut = even ? std::exp(-std::abs(omega) / omega_c)
                            : std::exp(-omega / omega_c);
    if (temperature == 0.0) {
        if (omega > 0.0) return 0.0;
        return -omega * cut;  // nbar -> -1 below zero frequency
    }
    const double u = omega / temperature;
    // omega * nbar -> T as omega -> 0; series keeps full precision there
    if (std::abs(u) < 1e-4)
        return temperature * (1.0 - u / 2.0 + u * u / 12.0) * cut;
    return omega / std::expm1(u) * cut;
}

double thermal_weight(double omega, const ChainParams& params, int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("thermal_weight: sign must be +1 or -1");
    double out = thermal_kernel(omega, params.temp_left, params.omega_c, false) +
                 thermal_kernel(omega, params.temp_right, params.omega_c, false);
    if (sign > 0) out += 2.0 * spectral_density(omega, params.omega_c);
    return out;
}

}  // namespace oqs
