// generators.hpp — canonical GKSL coefficient sets for the local, secular
// (global), and finite-window coarse-grained master equations.
#pragma once

#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "oqs/chain_params.hpp"
#include "oqs/quadrature.hpp"

namespace oqs {

enum class Basis { site, normal };

// Canonical normal form shared by every generator: effective Hamiltonian plus
// the two rate matrices of the dissipator
//   gamma_plus_ij  (c_i . c_j^dag - 1/2 {c_j^dag c_i, .})
//   gamma_minus_ij (c_i^dag . c_j - 1/2 {c_j c_i^dag, .})
// with all scalar prefactors folded into the rates.
struct GeneratorCoefficients {
    Basis basis = Basis::normal;
    Eigen::Matrix3cd h_eff = Eigen::Matrix3cd::Zero();
    Eigen::Matrix3cd gamma_plus = Eigen::Matrix3cd::Zero();
    Eigen::Matrix3cd gamma_minus = Eigen::Matrix3cd::Zero();
    std::string label;      // "local", "global", or "tcg"
    double delta_t = 0.0;   // averaging window; 0 when not applicable
};

// Ratio between the canonical rate normalization and the (delta_t / 8 pi)
// normalization returned by tcg_rates; fixed by requiring the infinite-window
// limit of the coarse-grained rates to land on the secular ones.
inline constexpr double tcg_rate_calibration = 6.283185307179586;

// One bath's share of a generator, used by the energy continuity bookkeeping.
struct BathComponents {
    Eigen::Matrix3cd h_ls = Eigen::Matrix3cd::Zero();  // lambda^2-scaled
    Eigen::Matrix3cd gamma_plus = Eigen::Matrix3cd::Zero();
    Eigen::Matrix3cd gamma_minus = Eigen::Matrix3cd::Zero();
};

struct GeneratorSplit {
    NormalModes modes;
    BathComponents left, right;
};

// Boundary-site generator: baths attach to sites 1 and 3 at the bare site
// frequency, middle site undamped.  Site basis.
GeneratorCoefficients build_local(const ChainParams& params,
                                  const QuadratureSpec& quad);

// Secular generator: one damping channel per positive-energy mode with weights
// (1/4, 1/2, 1/4).  A non-positive lowest mode energy drops channel 1 and its
// Lamb term entirely.  Normal-mode basis.
GeneratorCoefficients build_global(const ChainParams& params,
                                   const QuadratureSpec& quad);

// Finite-window rate matrices in the (delta_t / 8 pi) normalization, with the
// window phases attached:
//   gamma_plus_ij  = e^{i(eps_j - eps_i) dt/2} (dt/8pi) int f+_ij sinc sinc
//   gamma_minus_ij = e^{i(eps_i - eps_j) dt/2} (dt/8pi) int f-_ij sinc sinc
// over [-omega_c, omega_c].  The caller applies lambda^2 and the calibration.
std::pair<Eigen::Matrix3cd, Eigen::Matrix3cd> tcg_rates(
    const ChainParams& params, double delta_t, const QuadratureSpec& quad);

// Finite-window Lamb-shift pair (s_plus, s_minus); the Hermitian correction
// entering h_eff is lambda^2 (s_plus + s_minus^T), normal ordering constants
// dropped.
std::pair<Eigen::Matrix3cd, Eigen::Matrix3cd> tcg_lamb_shift(
    const ChainParams& params, double delta_t, const QuadratureSpec& quad);

// Full coarse-grained generator at window delta_t, canonically scaled so the
// delta_t -> infinity limit reproduces build_global.  Normal-mode basis.
GeneratorCoefficients build_tcg(const ChainParams& params, double delta_t,
                                const QuadratureSpec& quad);

// Rotate a normal-basis coefficient set to the site basis (conjugation by the
// orthogonal mode matrix).  Rejects coefficients already in the site basis.
GeneratorCoefficients to_site_basis(const GeneratorCoefficients& coeffs);

// Per-bath decompositions backing the sink/source bookkeeping; summing the
// two baths reproduces build_global / build_tcg exactly.
GeneratorSplit global_bath_components(const ChainParams& params,
                                      const QuadratureSpec& quad);
GeneratorSplit tcg_bath_components(const ChainParams& params, double delta_t,
                                   const QuadratureSpec& quad);

}  // namespace oqs
