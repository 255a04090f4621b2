// transport.cpp — observable extraction and both continuity bookkeepings.
#include "oqs/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oqs {

namespace {

using cd = std::complex<double>;

// projector onto the middle site expressed over normal modes
Eigen::Matrix3d middle_site_projector(const NormalModes& modes) {
    const Eigen::Vector3d v = modes.bogolubov.col(1);
    return v * v.transpose();
}

// uncentered <a_k^dag a_j> matrix (entry (j,k)) in the state's own basis
Eigen::Matrix3cd moment_matrix(const CovarianceState& state) {
    const Eigen::Matrix3cd c1 = state.c.topLeftCorner<3, 3>();
    const Eigen::Vector3cd d = state.d.head<3>();
    return 0.5 * (c1 - Eigen::Matrix3cd::Identity()) + d * d.adjoint();
}

CovarianceState in_site_basis(const CovarianceState& state,
                              const ChainParams& params) {
    if (state.basis == Basis::site) return state;
    return to_site_basis(state, normal_modes(params));
}

CovarianceState in_normal_basis(const CovarianceState& state,
                                const NormalModes& modes) {
    if (state.basis == Basis::normal) return state;
    return to_normal_basis(state, modes);
}

}  // namespace

std::string approach_name(Approach approach) {
    switch (approach) {
        case Approach::exact: return "exact";
        case Approach::local: return "local";
        case Approach::global: return "global";
        case Approach::tcg: return "tcg";
    }
    throw std::invalid_argument("approach_name: unknown approach");
}

double excitation_current(const CovarianceState& c, int j, int k) {
    if (c.basis != Basis::site)
        throw std::invalid_argument(
            "excitation_current: state must be in the site basis");
    if (j < 1 || j > 3 || k < 1 || k > 3 || j == k)
        throw std::invalid_argument(
            "excitation_current: sites must be distinct members of {1,2,3}");
    const Eigen::Matrix3cd n = moment_matrix(c);
    return -2.0 * n(j - 1, k - 1).imag();
}

double occupation(const CovarianceState& c, int i) {
    if (i < 1 || i > 3)
        throw std::invalid_argument("occupation: site must be in {1,2,3}");
    return 0.5 * (c.c(i - 1, i - 1).real() - 1.0) +
           std::norm(c.d(i - 1));
}

double energy_rhs_exact_or_local(const CovarianceState& c,
                                 const ChainParams& params) {
    const CovarianceState site = in_site_basis(c, params);
    return -params.g * (excitation_current(site, 1, 2) -
                        excitation_current(site, 2, 3));
}

EnergyRhsEvaluator::EnergyRhsEvaluator(const GeneratorSplit& split) {
    modes_ = split.modes;
    const Eigen::Matrix3d pi = middle_site_projector(modes_);
    const Eigen::Matrix3cd pic = pi.cast<cd>();

    // unitary divergence coefficient from the bare mode energies
    a_ = (modes_.epsilon[2] - modes_.epsilon[0]) * pi(0, 2) / sqrt2;

    const BathComponents* baths[2] = {&split.left, &split.right};
    for (int b = 0; b < 2; ++b) {
        const Eigen::Matrix3cd gpt = baths[b]->gamma_plus.transpose();
        const Eigen::Matrix3cd x =
            cd(0.0, -1.0) * (pic * baths[b]->h_ls - baths[b]->h_ls * pic) -
            0.5 * (pic * gpt + gpt * pic) +
            0.5 * (pic * baths[b]->gamma_minus + baths[b]->gamma_minus * pic);
        const double stray =
            std::max({std::abs(x(0, 1)), std::abs(x(1, 2)), std::abs(x(1, 1))});
        if (stray > 1e-10)
            throw std::runtime_error(
                "EnergyRhsEvaluator: continuity reduction has nonvanishing "
                "odd couplings");
        a_ += -x(0, 2).imag() / sqrt2;
        b_[b] = (x(2, 2).real() - x(0, 0).real()) / (2.0 * sqrt2);
        d_[b] = x(0, 0).real() + x(2, 2).real();
        f_[b] = (baths[b]->gamma_minus * pic).trace().real();
    }
}

EnergySinkSourceTcg EnergyRhsEvaluator::evaluate(
    const CovarianceState& state) const {
    const CovarianceState normal = in_normal_basis(state, modes_);
    const Eigen::Matrix3cd n = moment_matrix(normal);
    const Eigen::Matrix3d pi = middle_site_projector(modes_);
    const double n2 = (n * pi.cast<cd>()).trace().real();
    const double jm = -2.0 * sqrt2 * n(0, 2).imag();
    const double qp = sqrt2 * (n(2, 2).real() - n(0, 0).real());

    EnergySinkSourceTcg out;
    out.a_coeff = a_;
    const double q[2] = {b_[0] * qp + d_[0] * n2 + f_[0],
                         b_[1] * qp + d_[1] * n2 + f_[1]};
    out.q_left = q[0];
    out.q_right = q[1];
    out.rhs = a_ * jm + q[0] + q[1];
    return out;
}

EnergySinkSource energy_rhs_global(const CovarianceState& c,
                                   const ChainParams& params,
                                   const QuadratureSpec& quad) {
    const EnergyRhsEvaluator eval(global_bath_components(params, quad));
    const EnergySinkSourceTcg full = eval.evaluate(c);
    return {full.rhs, full.q_left, full.q_right};
}

EnergySinkSourceTcg energy_rhs_tcg(const CovarianceState& c,
                                   const ChainParams& params, double delta_t,
                                   const QuadratureSpec& quad) {
    const EnergyRhsEvaluator eval(tcg_bath_components(params, delta_t, quad));
    return eval.evaluate(c);
}

std::vector<EnergyTransportReport> energy_transport_reports(
    const std::vector<CovarianceState>& traj, Approach approach,
    const ChainParams& params, const QuadratureSpec& quad, double delta_t) {
    if (traj.size() < 3)
        throw std::invalid_argument(
            "energy_transport_reports: need at least three uniformly spaced "
            "samples");
    const double step = traj[1].t - traj[0].t;
    for (std::size_t i = 1; i < traj.size(); ++i)
        if (std::abs(traj[i].t - traj[i - 1].t - step) > 1e-9 * step)
            throw std::invalid_argument(
                "energy_transport_reports: sample times are not uniform");

    EnergyRhsEvaluator* eval = nullptr;
    EnergyRhsEvaluator storage = [&] {
        switch (approach) {
            case Approach::global:
                return EnergyRhsEvaluator(global_bath_components(params, quad));
            case Approach::tcg:
                if (!(delta_t > 0.0))
                    throw std::invalid_argument(
                        "energy_transport_reports: tcg needs delta_t > 0");
                return EnergyRhsEvaluator(
                    tcg_bath_components(params, delta_t, quad));
            default:
                // divergence-form approaches reuse the evaluator type with
                // zero bath pieces; only the currents are consulted
                return EnergyRhsEvaluator(
                    GeneratorSplit{normal_modes(params), {}, {}});
        }
    }();
    eval = &storage;
    if (approach == Approach::global || approach == Approach::tcg) {
        const double rate = std::abs(build_drift_diffusion([&] {
                                         return approach == Approach::global
                                                    ? build_global(params, quad)
                                                    : build_tcg(params, delta_t,
                                                                quad);
                                     }())
                                         .max_re_eig());
        if (rate > 0.0 && step > 0.2 / rate)
            throw std::invalid_argument(
                "energy_transport_reports: trajectory too sparse for central "
                "differences");
    }

    std::vector<EnergyTransportReport> rows;
    rows.reserve(traj.size() - 2);
    std::vector<double> n2(traj.size());
    std::vector<CovarianceState> site(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        site[i] = in_site_basis(traj[i], params);
        n2[i] = occupation(site[i], 2);
    }
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        EnergyTransportReport row;
        row.approach = approach_name(approach);
        row.delta_t = approach == Approach::tcg ? delta_t : 0.0;
        row.t = traj[i].t;
        row.j12 = excitation_current(site[i], 1, 2);
        row.j23 = excitation_current(site[i], 2, 3);
        row.n2_rate = (n2[i + 1] - n2[i - 1]) / (2.0 * step);
        double rhs = 0.0;
        if (approach == Approach::global || approach == Approach::tcg) {
            const EnergySinkSourceTcg terms = eval->evaluate(traj[i]);
            rhs = terms.rhs;
            row.q_left = terms.q_left;
            row.q_right = terms.q_right;
        } else {
            rhs = energy_rhs_exact_or_local(site[i], params);
        }
        row.residual = std::abs(row.n2_rate - rhs);
        rows.push_back(std::move(row));
    }
    return rows;
}

double energy_continuity_residual(const std::vector<CovarianceState>& traj,
                                  Approach approach, const ChainParams& params,
                                  const QuadratureSpec& quad, double delta_t) {
    double worst = 0.0;
    for (const EnergyTransportReport& row :
         energy_transport_reports(traj, approach, params, quad, delta_t))
        worst = std::max(worst, row.residual);
    return worst;
}

QuadratureMoments quadrature_covariance(const CovarianceState& c,
                                        double omega0) {
    if (!(omega0 > 0.0))
        throw std::invalid_argument(
            "quadrature_covariance: omega0 must be positive");
    const double xs = 1.0 / std::sqrt(2.0 * omega0);
    const double ps = std::sqrt(omega0 / 2.0);
    Eigen::Matrix<cd, 6, 6> map = Eigen::Matrix<cd, 6, 6>::Zero();
    for (int i = 0; i < 3; ++i) {
        map(i, i) = xs;
        map(i, 3 + i) = xs;
        map(3 + i, i) = cd(0.0, -ps);
        map(3 + i, 3 + i) = cd(0.0, ps);
    }
    const Eigen::Matrix<cd, 6, 6> cov_c = 0.5 * (map * c.c * map.adjoint());
    const Eigen::Matrix<cd, 6, 1> mean_c = map * c.d;

    QuadratureMoments out;
    out.cov = 0.5 * (cov_c.real() + cov_c.real().transpose());
    out.mean = mean_c.real();
    if (cov_c.imag().cwiseAbs().maxCoeff() > 1e-9 ||
        mean_c.imag().cwiseAbs().maxCoeff() > 1e-9)
        throw std::runtime_error(
            "quadrature_covariance: moments have spurious imaginary parts");
    return out;
}

namespace {

struct FieldCoefficients {
    Eigen::Matrix3d d_unit;       // p-coupling of the bare chain flux
    Eigen::Matrix3d d_diss;       // remaining p-coupling
    Eigen::Matrix3d d_xx;         // x-coupling
    Eigen::Vector3d sigma_noise;  // position diffusion per site
};

FieldCoefficients field_coefficients(const GeneratorCoefficients& coeffs,
                                     const ChainParams& params) {
    if (coeffs.basis != Basis::site)
        throw std::invalid_argument(
            "probability_currents: coefficients must be in the site basis");
    const double w0 = params.omega0;
    const Eigen::Matrix3cd r =
        0.5 * (coeffs.gamma_minus - coeffs.gamma_plus.transpose());
    const Eigen::Matrix3cd n_hat =
        coeffs.gamma_minus + coeffs.gamma_plus.transpose();
    FieldCoefficients out;
    const Eigen::Matrix3d d_total = (coeffs.h_eff.real() - r.imag()) / w0;
    out.d_unit = site_hamiltonian(params) / w0;
    out.d_diss = d_total - out.d_unit;
    out.d_xx = coeffs.h_eff.imag() + r.real();
    out.sigma_noise = n_hat.diagonal().real() / (2.0 * w0);
    return out;
}

void check_coverage(SpatialField& field, const QuadratureMoments& moments) {
    for (int l = 0; l < 3; ++l) {
        const double sigma = std::sqrt(moments.cov(l, l));
        if (moments.mean(l) - 4.0 * sigma < field.grid.front() ||
            moments.mean(l) + 4.0 * sigma > field.grid.back())
            field.coverage_ok = false;
    }
}

}  // namespace

std::vector<double> default_spatial_grid(const CovarianceState& c,
                                         double omega0, int points) {
    if (points < 2)
        throw std::invalid_argument(
            "default_spatial_grid: need at least two points");
    const QuadratureMoments moments = quadrature_covariance(c, omega0);
    double sigma_max = 0.0;
    for (int l = 0; l < 3; ++l)
        sigma_max = std::max(sigma_max, std::sqrt(moments.cov(l, l)));
    const double lo = moments.mean.head<3>().minCoeff() - 8.0 * sigma_max;
    const double hi = moments.mean.head<3>().maxCoeff() + 8.0 * sigma_max;
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = lo + (hi - lo) * i / (points - 1);
    return grid;
}

SpatialField probability_density(const CovarianceState& c,
                                 const std::vector<double>& grid,
                                 double omega0) {
    if (grid.size() < 2 || !std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument(
            "probability_density: grid must be sorted with >= 2 points");
    const QuadratureMoments moments = quadrature_covariance(c, omega0);
    SpatialField field;
    field.grid = grid;
    field.density.assign(grid.size(), 0.0);
    check_coverage(field, moments);
    for (int l = 0; l < 3; ++l) {
        const double var = moments.cov(l, l);
        const double mu = moments.mean(l);
        const double norm = 1.0 / std::sqrt(2.0 * M_PI * var);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double z = grid[i] - mu;
            field.density[i] += norm * std::exp(-z * z / (2.0 * var)) / 3.0;
        }
    }
    return field;
}

SpatialField probability_currents(const CovarianceState& c,
                                  const GeneratorCoefficients& coeffs,
                                  const std::vector<double>& grid,
                                  const ChainParams& params) {
    const FieldCoefficients fc = field_coefficients(coeffs, params);
    const CovarianceState site = in_site_basis(c, params);
    const QuadratureMoments moments =
        quadrature_covariance(site, params.omega0);

    SpatialField field = probability_density(site, grid, params.omega0);
    const std::size_t m = grid.size();
    field.j_unitary.assign(m, 0.0);
    field.j_dissipative.assign(m, 0.0);
    field.q_term.assign(m, 0.0);
    field.p_term.assign(m, 0.0);

    for (int l = 0; l < 3; ++l) {
        const double var = moments.cov(l, l);
        const double mu = moments.mean(l);
        const double norm = 1.0 / std::sqrt(2.0 * M_PI * var);
        for (std::size_t i = 0; i < m; ++i) {
            const double z = grid[i] - mu;
            const double pdf = norm * std::exp(-z * z / (2.0 * var));
            field.p_term[i] += -fc.sigma_noise(l) * pdf / 6.0;
            for (int k = 0; k < 3; ++k) {
                const double cond_p =
                    moments.mean(3 + k) + moments.cov(3 + k, l) / var * z;
                const double cond_x =
                    moments.mean(k) + moments.cov(k, l) / var * z;
                field.j_unitary[i] += pdf * fc.d_unit(l, k) * cond_p / 3.0;
                field.j_dissipative[i] += pdf * fc.d_diss(l, k) * cond_p / 3.0;
                field.q_term[i] += pdf * fc.d_xx(l, k) * cond_x / 3.0;
            }
        }
    }
    return field;
}

double probability_continuity_residual(const std::vector<CovarianceState>& traj,
                                       const GeneratorCoefficients& coeffs,
                                       const std::vector<double>& grid,
                                       const ChainParams& params) {
    if (traj.size() < 3)
        throw std::invalid_argument(
            "probability_continuity_residual: need at least three samples");
    const double step = traj[1].t - traj[0].t;
    for (std::size_t i = 1; i < traj.size(); ++i)
        if (std::abs(traj[i].t - traj[i - 1].t - step) > 1e-9 * step)
            throw std::invalid_argument(
                "probability_continuity_residual: sample times are not "
                "uniform");
    if (grid.size() < 7)
        throw std::invalid_argument(
            "probability_continuity_residual: grid too coarse");
    const double dx = grid[1] - grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - grid[i - 1] - dx) > 1e-9 * dx)
            throw std::invalid_argument(
                "probability_continuity_residual: grid is not uniform");

    std::vector<SpatialField> fields;
    fields.reserve(traj.size());
    for (const CovarianceState& state : traj)
        fields.push_back(probability_currents(state, coeffs, grid, params));

    const std::size_t m = grid.size();
    std::vector<double> flux(m), dp(m);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const SpatialField& f = fields[i];
        for (std::size_t j = 1; j + 1 < m; ++j)
            dp[j] = (f.p_term[j + 1] - f.p_term[j - 1]) / (2.0 * dx);
        for (std::size_t j = 2; j + 2 < m; ++j)
            flux[j] = f.j_unitary[j] + f.j_dissipative[j] + f.q_term[j] + dp[j];
        for (std::size_t j = 3; j + 3 < m; ++j) {
            const double drho = (fields[i + 1].density[j] -
                                 fields[i - 1].density[j]) /
                                (2.0 * step);
            const double div = (flux[j + 1] - flux[j - 1]) / (2.0 * dx);
            worst = std::max(worst, std::abs(drho + div));
        }
    }
    return worst;
}

}  // namespace oqs
