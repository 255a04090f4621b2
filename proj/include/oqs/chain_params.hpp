// chain_params.hpp — physical parameters, bath functions, and the normal-mode
// structure of the three-oscillator chain.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace oqs {

inline constexpr double sqrt2 = 1.4142135623730951;

// Chain and bath parameters. Temperatures are in units with k_B = 1.
struct ChainParams {
    double omega0 = 1.0;      // site frequency
    double g = 0.3;           // nearest-neighbour hopping
    double lambda = 0.1;      // dimensionless system-bath coupling
    double omega_c = 3.0;     // spectral cutoff frequency
    double temp_left = 10.0;  // left bath temperature
    double temp_right = 1.0;  // right bath temperature

    // True when the lowest normal mode keeps a positive energy; consumers of
    // the secular generator branch on this to drop the undamped channel.
    bool resonant_gap_positive() const noexcept { return g < omega0 / sqrt2; }

    bool operator==(const ChainParams&) const = default;

    void validate() const {
        if (!(omega0 > 0.0))
            throw std::invalid_argument("ChainParams: omega0 must be > 0");
        if (!(omega_c > 0.0))
            throw std::invalid_argument("ChainParams: omega_c must be > 0");
        if (!(g >= 0.0))
            throw std::invalid_argument("ChainParams: g must be >= 0");
        if (!(lambda >= 0.0))
            throw std::invalid_argument("ChainParams: lambda must be >= 0");
        if (!(temp_left >= 0.0) || !(temp_right >= 0.0))
            throw std::invalid_argument("ChainParams: temperatures must be >= 0");
    }
};

// Normal-mode data: energies and the orthogonal mode-mixing matrix T with
// c = T a.  Moment matrices map between bases as  A_site = T^T A_normal T.
struct NormalModes {
    std::array<double, 3> epsilon{};  // mode energies, ascending for g > 0
    Eigen::Matrix3d bogolubov;        // orthogonal T, rows are mode vectors
};

NormalModes normal_modes(const ChainParams& params);

// Bare chain Hamiltonian matrix in the site basis: omega0 on the diagonal,
// g on the first off-diagonals.
Eigen::Matrix3d site_hamiltonian(const ChainParams& params);

// Ohmic density J(omega) = omega * exp(-omega/omega_c), evaluated by this
// formula on the whole real line.
double spectral_density(double omega, double omega_c);

// Even-cutoff variant omega * exp(-|omega|/omega_c).  The finite-window
// quadratures use this branch so the rate kernels stay sign-definite on the
// negative-frequency half of the integration window.
double spectral_density_even(double omega, double omega_c);

// Bose occupation 1/(e^{omega/T} - 1).  T = 0 returns the pointwise limit
// (0 for omega > 0, -1 for omega < 0).  Throws on omega = 0 with T > 0; the
// removable omega -> 0 point is only ever needed through thermal_kernel.
double mean_photon(double omega, double temperature);

// J~(omega) * nbar(omega, T) with the omega -> 0 removable singularity
// handled by series (limit T).  `even` selects the cutoff branch of J~.
double thermal_kernel(double omega, double temperature, double omega_c,
                      bool even);

// tau^{+}(omega) = sum_a J(omega)(nbar_a + 1), tau^{-} = sum_a J(omega)nbar_a
// over both baths, formula branch of J.  sign must be +1 or -1.
double thermal_weight(double omega, const ChainParams& params, int sign);

}  // namespace oqs
