// transport.hpp — excitation currents, energy continuity bookkeeping, and
// spatial probability density/current fields.
#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oqs/chain_params.hpp"
#include "oqs/dynamics.hpp"
#include "oqs/generators.hpp"
#include "oqs/quadrature.hpp"

namespace oqs {

enum class Approach { exact, local, global, tcg };

std::string approach_name(Approach approach);

// One row of the energy continuity record at a sample time.
struct EnergyTransportReport {
    std::string approach;
    double delta_t = 0.0;  // 0 when not applicable
    double t = 0.0;
    double j12 = 0.0;
    double j23 = 0.0;
    double q_left = 0.0;
    double q_right = 0.0;
    double n2_rate = 0.0;   // central-difference d<a2^dag a2>/dt
    double residual = 0.0;  // |n2_rate - approach RHS|
};

// <J_jk> = i(<a_j a_k^dag> - <a_j^dag a_k>), sites 1..3, site basis.
double excitation_current(const CovarianceState& c, int j, int k);

// <a_i^dag a_i> from the block-1 diagonal and the displacement.
double occupation(const CovarianceState& c, int i);

// Full divergence-form RHS -g (<J12> - <J23>) shared by the exact and local
// continuity equations.
double energy_rhs_exact_or_local(const CovarianceState& c,
                                 const ChainParams& params);

struct EnergySinkSource {
    double rhs = 0.0;
    double q_left = 0.0;
    double q_right = 0.0;
};

struct EnergySinkSourceTcg {
    double rhs = 0.0;
    double q_left = 0.0;
    double q_right = 0.0;
    double a_coeff = 0.0;  // divergence coefficient multiplying <J12 - J23>
};

// Middle-site continuity coefficients reduced from per-bath generator pieces:
// rhs = A <J12 - J23> + sum_alpha (B_alpha <Q12 + Q23> + D_alpha <a2^dag a2>
// + F_alpha), with the bracketed sum reported per bath as the sink/source.
class EnergyRhsEvaluator {
  public:
    explicit EnergyRhsEvaluator(const GeneratorSplit& split);
    double a_coeff() const { return a_; }
    EnergySinkSourceTcg evaluate(const CovarianceState& state) const;

  private:
    NormalModes modes_;
    double a_ = 0.0;
    std::array<double, 2> b_{};  // left, right
    std::array<double, 2> d_{};
    std::array<double, 2> f_{};
};

// Richer continuity RHS of the secular generator, with closed-form sink and
// source terms; the non-positive lowest mode channel is dropped consistently
// with build_global.
EnergySinkSource energy_rhs_global(const CovarianceState& c,
                                   const ChainParams& params,
                                   const QuadratureSpec& quad);

// Continuity RHS of the coarse-grained generator at window delta_t.
EnergySinkSourceTcg energy_rhs_tcg(const CovarianceState& c,
                                   const ChainParams& params, double delta_t,
                                   const QuadratureSpec& quad);

// Reports at interior sample times of a uniformly sampled trajectory; the
// residual column compares the central-difference occupation rate against the
// approach's continuity RHS.
std::vector<EnergyTransportReport> energy_transport_reports(
    const std::vector<CovarianceState>& traj, Approach approach,
    const ChainParams& params, const QuadratureSpec& quad,
    double delta_t = 0.0);

double energy_continuity_residual(const std::vector<CovarianceState>& traj,
                                  Approach approach, const ChainParams& params,
                                  const QuadratureSpec& quad,
                                  double delta_t = 0.0);

// Symmetrized second moments and means of (x1, x2, x3, p1, p2, p3).
struct QuadratureMoments {
    Eigen::Matrix<double, 6, 6> cov;
    Eigen::Matrix<double, 6, 1> mean;
};

QuadratureMoments quadrature_covariance(const CovarianceState& c,
                                        double omega0);

// Sampled spatial fields of the three-site position mixture.
struct SpatialField {
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<double> j_unitary;
    std::vector<double> j_dissipative;
    std::vector<double> q_term;
    std::vector<double> p_term;
    bool coverage_ok = true;  // grid spans 8 sigma of every site marginal
};

// Equally spaced grid covering every site marginal out to 8 standard
// deviations.
std::vector<double> default_spatial_grid(const CovarianceState& c,
                                         double omega0, int points = 1024);

// rho_t(x) = (1/3) sum_l Normal(x; mu_l, Var(x_l)); density field only.
SpatialField probability_density(const CovarianceState& c,
                                 const std::vector<double>& grid,
                                 double omega0);

// All current/coefficient fields via Gaussian conditional-moment identities;
// coeffs must be in the site basis.
SpatialField probability_currents(const CovarianceState& c,
                                  const GeneratorCoefficients& coeffs,
                                  const std::vector<double>& grid,
                                  const ChainParams& params);

// Max over interior grid and time points of the central-difference residual
// of d/dt rho + d/dx (j_unitary + j_dissipative + q_term + d/dx p_term).
double probability_continuity_residual(const std::vector<CovarianceState>& traj,
                                       const GeneratorCoefficients& coeffs,
                                       const std::vector<double>& grid,
                                       const ChainParams& params);

}  // namespace oqs
