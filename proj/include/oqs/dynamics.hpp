// dynamics.hpp — Gaussian covariance propagation, steady states, and the
// discretized-bath reference evolution.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "oqs/chain_params.hpp"
#include "oqs/generators.hpp"

namespace oqs {

using Matrix6cd = Eigen::Matrix<std::complex<double>, 6, 6>;
using Vector6cd = Eigen::Matrix<std::complex<double>, 6, 1>;

// Second moments and displacement of a Gaussian state in the ordering
// xi = (a1, a2, a3, a1^dag, a2^dag, a3^dag):
//   c_ij = <xi_i xi_j^dag + xi_j^dag xi_i> - 2 <xi_i><xi_j^dag>,  d_i = <xi_i>
struct CovarianceState {
    Basis basis = Basis::site;
    Matrix6cd c = Matrix6cd::Identity();
    Vector6cd d = Vector6cd::Zero();
    double t = 0.0;

    static CovarianceState vacuum(Basis basis);
    // Hermiticity to 1e-10, eigenvalues >= -1e-8, block-1 diagonal >= 1 - 1e-8,
    // d_{3+i} = conj(d_i)
    void validate() const;
};

// Conjugation by the orthogonal mode matrix on both moment blocks.
CovarianceState to_site_basis(const CovarianceState& state,
                              const NormalModes& modes);
CovarianceState to_normal_basis(const CovarianceState& state,
                                const NormalModes& modes);

// Matrices of the linear moment flow dc/dt = m c + c m^dag + n, dd/dt = m d.
// Both are direct sums of a reduced 3x3 block and its complex conjugate.
struct DriftDiffusion {
    Basis basis = Basis::normal;
    Matrix6cd m = Matrix6cd::Zero();
    Matrix6cd n = Matrix6cd::Zero();
    Eigen::Matrix3cd m_hat = Eigen::Matrix3cd::Zero();
    Eigen::Matrix3cd n_hat = Eigen::Matrix3cd::Zero();

    double max_re_eig() const;  // spectral abscissa of m_hat
};

// m_hat = -i h + (gamma_minus - gamma_plus^T)/2, n_hat = gamma_minus +
// gamma_plus^T, extended to 6x6 by the conjugate block.  Rejects coefficient
// sets whose h or rate matrices fail Hermiticity beyond 1e-10.
DriftDiffusion build_drift_diffusion(const GeneratorCoefficients& coeffs);

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4), PI step control) with
// emission exactly at the requested sample times.  The two-argument tail
// overload samples only the final time.
std::vector<CovarianceState> evolve(const CovarianceState& state0,
                                    const DriftDiffusion& dd, double t_end,
                                    double tol,
                                    const std::vector<double>& sample_times);
std::vector<CovarianceState> evolve(const CovarianceState& state0,
                                    const DriftDiffusion& dd, double t_end,
                                    double tol);

// Unique stationary state from the vectorized 9x9 solve of
// m_hat C1 + C1 m_hat^dag = -n_hat, with C2 = 0 and d = 0.  Throws when the
// system is singular (drift not dissipative).
CovarianceState steady_state(const DriftDiffusion& dd);

// Long-time limit when some mode pairs are undamped: damped pairs solve the
// stationarity condition, undamped pairs keep the initial-state values.
// Throws if an undamped pair is driven (no stationary state exists) or if the
// drift has a growing direction.
CovarianceState steady_state(const DriftDiffusion& dd,
                             const CovarianceState& from_state);

// Uniform-grid bath sampling: midpoint frequencies on (0, omega_max],
// couplings gamma_k = sqrt(J(omega_k) d_omega).
struct BathDiscretization {
    int modes_per_bath = 512;
    std::vector<double> frequencies;
    std::vector<double> couplings;
    double omega_max = 0.0;

    static BathDiscretization uniform(const ChainParams& params, int k,
                                      double omega_max_factor = 12.0);
    double recurrence_time() const;  // 2 pi / grid spacing
    void validate(const ChainParams& params) const;
};

struct ExactTrajectory {
    std::vector<CovarianceState> states;  // site basis, system block only
    double recurrence_time = 0.0;
    bool recurrence_exceeded = false;  // validity warning for t > recurrence
};

// Closed-form Heisenberg flow of the (3 + 2K)-mode chain-plus-baths system
// from the product of state0 with thermal bath covariances; returns the 6x6
// system block at the sample times.  tol is accepted for interface parity;
// the propagator is exact up to the single dense eigendecomposition.
ExactTrajectory exact_reference(const ChainParams& params,
                                const BathDiscretization& disc,
                                const CovarianceState& state0, double t_end,
                                double tol,
                                const std::vector<double>& sample_times);
ExactTrajectory exact_reference(const ChainParams& params,
                                const BathDiscretization& disc,
                                const CovarianceState& state0, double t_end,
                                double tol);

}  // namespace oqs
