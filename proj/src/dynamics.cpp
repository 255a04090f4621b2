// dynamics.cpp — covariance flow integration, stationary solves, and the
// discretized-bath reference propagator.
#include "oqs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oqs {

namespace {

using cd = std::complex<double>;

Matrix6cd mode_rotation(const NormalModes& modes) {
    Matrix6cd r = Matrix6cd::Zero();
    r.topLeftCorner<3, 3>() = modes.bogolubov.cast<cd>();
    r.bottomRightCorner<3, 3>() = modes.bogolubov.cast<cd>();
    return r;
}

double hermiticity_defect(const Eigen::Ref<const Eigen::MatrixXcd>& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

CovarianceState CovarianceState::vacuum(Basis basis) {
    CovarianceState state;
    state.basis = basis;
    return state;
}

void CovarianceState::validate() const {
    if (hermiticity_defect(c) > 1e-10)
        throw std::invalid_argument("CovarianceState: c is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix6cd> es(c, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw std::invalid_argument(
            "CovarianceState: c has a negative eigenvalue beyond tolerance");
    for (int i = 0; i < 3; ++i) {
        if (c(i, i).real() < 1.0 - 1e-8)
            throw std::invalid_argument(
                "CovarianceState: occupation diagonal below the vacuum floor");
        if (std::abs(d(3 + i) - std::conj(d(i))) > 1e-10)
            throw std::invalid_argument(
                "CovarianceState: displacement halves are not conjugate");
    }
}

CovarianceState to_site_basis(const CovarianceState& state,
                              const NormalModes& modes) {
    if (state.basis != Basis::normal)
        throw std::invalid_argument(
            "to_site_basis: state is already in the site basis");
    const Matrix6cd r = mode_rotation(modes);
    CovarianceState out = state;
    out.basis = Basis::site;
    out.c = r.transpose() * state.c * r;
    out.d = r.transpose() * state.d;
    return out;
}

CovarianceState to_normal_basis(const CovarianceState& state,
                                const NormalModes& modes) {
    if (state.basis != Basis::site)
        throw std::invalid_argument(
            "to_normal_basis: state is already in the normal basis");
    const Matrix6cd r = mode_rotation(modes);
    CovarianceState out = state;
    out.basis = Basis::normal;
    out.c = r * state.c * r.transpose();
    out.d = r * state.d;
    return out;
}

double DriftDiffusion::max_re_eig() const {
    return Eigen::ComplexEigenSolver<Eigen::Matrix3cd>(m_hat, false)
        .eigenvalues()
        .real()
        .maxCoeff();
}

DriftDiffusion build_drift_diffusion(const GeneratorCoefficients& coeffs) {
    if (hermiticity_defect(coeffs.h_eff) > 1e-10 ||
        hermiticity_defect(coeffs.gamma_plus) > 1e-10 ||
        hermiticity_defect(coeffs.gamma_minus) > 1e-10)
        throw std::invalid_argument(
            "build_drift_diffusion: coefficient matrices are not Hermitian");
    DriftDiffusion dd;
    dd.basis = coeffs.basis;
    dd.m_hat = cd(0.0, -1.0) * coeffs.h_eff +
               0.5 * (coeffs.gamma_minus - coeffs.gamma_plus.transpose());
    dd.n_hat = coeffs.gamma_minus + coeffs.gamma_plus.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(dd.n_hat,
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::invalid_argument(
            "build_drift_diffusion: diffusion block is not positive "
            "semidefinite");
    dd.m.topLeftCorner<3, 3>() = dd.m_hat;
    dd.m.bottomRightCorner<3, 3>() = dd.m_hat.conjugate();
    dd.n.topLeftCorner<3, 3>() = dd.n_hat;
    dd.n.bottomRightCorner<3, 3>() = dd.n_hat.conjugate();
    return dd;
}

namespace {

struct FlowDerivative {
    Matrix6cd c;
    Vector6cd d;
};

FlowDerivative flow(const DriftDiffusion& dd, const Matrix6cd& c,
                    const Vector6cd& d) {
    FlowDerivative out;
    out.c = dd.m * c + c * dd.m.adjoint() + dd.n;
    out.d = dd.m * d;
    return out;
}

// Dormand-Prince 5(4) tableau
constexpr double kA[7][6] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0}};
constexpr double kErr[7] = {71.0 / 57600.0,      0.0,
                            -71.0 / 16695.0,     71.0 / 1920.0,
                            -17253.0 / 339200.0, 22.0 / 525.0,
                            -1.0 / 40.0};

double error_ratio(const Matrix6cd& ec, const Vector6cd& ed,
                   const Matrix6cd& c0, const Matrix6cd& c1,
                   const Vector6cd& d0, const Vector6cd& d1, double tol) {
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            const double scale =
                tol * (1.0 + std::max(std::abs(c0(i, j)), std::abs(c1(i, j))));
            worst = std::max(worst, std::abs(ec(i, j)) / scale);
        }
        const double scale =
            tol * (1.0 + std::max(std::abs(d0(i)), std::abs(d1(i))));
        worst = std::max(worst, std::abs(ed(i)) / scale);
    }
    return worst;
}

CovarianceState emit(const DriftDiffusion& dd, const Matrix6cd& c,
                     const Vector6cd& d, double t) {
    CovarianceState state;
    state.basis = dd.basis;
    state.c = 0.5 * (c + c.adjoint());
    state.d = d;
    state.d.tail<3>() = d.head<3>().conjugate();
    state.t = t;
    state.validate();
    return state;
}

}  // namespace

std::vector<CovarianceState> evolve(const CovarianceState& state0,
                                    const DriftDiffusion& dd, double t_end,
                                    double tol,
                                    const std::vector<double>& sample_times) {
    if (dd.basis != state0.basis)
        throw std::invalid_argument("evolve: state and drift basis differ");
    if (!(t_end > state0.t))
        throw std::invalid_argument("evolve: t_end must exceed the state time");
    if (!(tol > 0.0))
        throw std::invalid_argument("evolve: tolerance must be positive");
    state0.validate();
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        const double prev = i == 0 ? state0.t : sample_times[i - 1];
        if (!(sample_times[i] > prev) || sample_times[i] > t_end + 1e-12)
            throw std::invalid_argument(
                "evolve: sample times must increase within (t0, t_end]");
    }

    std::vector<CovarianceState> traj;
    traj.reserve(sample_times.size() + 1);
    traj.push_back(state0);

    Matrix6cd c = state0.c;
    Vector6cd d = state0.d;
    double t = state0.t;
    double h = std::min(0.05, (t_end - t) / 4.0);
    double err_prev = 1e-4;
    bool rejected = false;
    std::size_t next = 0;

    Matrix6cd kc[7];
    Vector6cd kd[7];
    while (next < sample_times.size()) {
        const double target = sample_times[next];
        if (t + h > target) h = target - t;
        if (h < 1e-13 * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "evolve: step size underflow at t = " << t;
            throw std::runtime_error(msg.str());
        }

        FlowDerivative k0 = flow(dd, c, d);
        kc[0] = k0.c;
        kd[0] = k0.d;
        for (int s = 1; s < 6; ++s) {
            Matrix6cd cs = c;
            Vector6cd ds = d;
            for (int j = 0; j < s; ++j) {
                cs += h * kA[s][j] * kc[j];
                ds += h * kA[s][j] * kd[j];
            }
            FlowDerivative ks = flow(dd, cs, ds);
            kc[s] = ks.c;
            kd[s] = ks.d;
        }
        Matrix6cd c_new = c;
        Vector6cd d_new = d;
        for (int j = 0; j < 6; ++j) {
            c_new += h * kA[6][j] * kc[j];
            d_new += h * kA[6][j] * kd[j];
        }
        FlowDerivative k6 = flow(dd, c_new, d_new);
        kc[6] = k6.c;
        kd[6] = k6.d;

        Matrix6cd ec = Matrix6cd::Zero();
        Vector6cd ed = Vector6cd::Zero();
        for (int j = 0; j < 7; ++j) {
            ec += h * kErr[j] * kc[j];
            ed += h * kErr[j] * kd[j];
        }
        const double err = error_ratio(ec, ed, c, c_new, d, d_new, tol);

        if (err <= 1.0) {
            t += h;
            c = c_new;
            d = d_new;
            if (std::abs(t - target) < 1e-12 * std::max(1.0, std::abs(target))) {
                traj.push_back(emit(dd, c, d, target));
                ++next;
            }
            const double grow = rejected ? 1.0 : 5.0;
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.17) *
                         std::pow(err_prev, 0.04);
            h *= std::clamp(fac, 0.2, grow);
            err_prev = std::max(err, 1e-4);
            rejected = false;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
            rejected = true;
        }
    }
    return traj;
}

std::vector<CovarianceState> evolve(const CovarianceState& state0,
                                    const DriftDiffusion& dd, double t_end,
                                    double tol) {
    return evolve(state0, dd, t_end, tol, {t_end});
}

CovarianceState steady_state(const DriftDiffusion& dd) {
    if (dd.max_re_eig() > 1e-10)
        throw std::runtime_error(
            "steady_state: drift has a growing mode, no stationary state");
    Eigen::Matrix<cd, 9, 9> f = Eigen::Matrix<cd, 9, 9>::Zero();
    Eigen::Matrix<cd, 9, 1> rhs;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                f(i + 3 * j, k + 3 * j) += dd.m_hat(i, k);
                f(i + 3 * j, i + 3 * k) += std::conj(dd.m_hat(j, k));
            }
            rhs(i + 3 * j) = -dd.n_hat(i, j);
        }
    Eigen::FullPivLU<Eigen::Matrix<cd, 9, 9>> lu(f);
    if (!lu.isInvertible())
        throw std::runtime_error(
            "steady_state: stationarity system is singular (drift is not "
            "dissipative)");
    const Eigen::Matrix<cd, 9, 1> x = lu.solve(rhs);
    Eigen::Matrix3cd c1;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c1(i, j) = x(i + 3 * j);
    c1 = 0.5 * (c1 + c1.adjoint()).eval();

    CovarianceState state;
    state.basis = dd.basis;
    state.c = Matrix6cd::Identity();
    state.c.topLeftCorner<3, 3>() = c1;
    state.c.bottomRightCorner<3, 3>() = c1.transpose();
    state.t = 0.0;
    state.validate();
    return state;
}

CovarianceState steady_state(const DriftDiffusion& dd,
                             const CovarianceState& from_state) {
    if (dd.basis != from_state.basis)
        throw std::invalid_argument(
            "steady_state: state and drift basis differ");
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(dd.m_hat);
    const Eigen::Vector3cd lam = es.eigenvalues();
    if (lam.real().maxCoeff() > 1e-10)
        throw std::runtime_error(
            "steady_state: drift has a growing mode, no stationary state");
    const Eigen::Matrix3cd v = es.eigenvectors();
    const Eigen::Matrix3cd vinv = v.inverse();

    const Eigen::Matrix3cd c1_0 = from_state.c.topLeftCorner<3, 3>();
    const Eigen::Matrix3cd c2_0 = from_state.c.topRightCorner<3, 3>();
    const Eigen::Matrix3cd np = vinv * dd.n_hat * vinv.adjoint();
    const Eigen::Matrix3cd c1p0 = vinv * c1_0 * vinv.adjoint();
    const Eigen::Matrix3cd c2p0 = vinv * c2_0 * vinv.transpose();

    Eigen::Matrix3cd c1p, c2p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const cd rate = lam(i) + std::conj(lam(j));
            if (rate.real() < -1e-10) {
                c1p(i, j) = -np(i, j) / rate;
            } else {
                if (std::abs(np(i, j)) > 1e-10)
                    throw std::runtime_error(
                        "steady_state: undamped mode pair is driven, no "
                        "stationary state");
                c1p(i, j) = c1p0(i, j);
            }
            c2p(i, j) = (lam(i) + lam(j)).real() < -1e-10 ? cd(0.0, 0.0)
                                                          : c2p0(i, j);
        }
    Eigen::Matrix3cd c1 = v * c1p * v.adjoint();
    c1 = 0.5 * (c1 + c1.adjoint()).eval();
    const Eigen::Matrix3cd c2 = v * c2p * v.transpose();

    Eigen::Vector3cd w = vinv * from_state.d.head<3>();
    for (int i = 0; i < 3; ++i)
        if (lam(i).real() < -1e-10) w(i) = 0.0;
    const Eigen::Vector3cd d_top = v * w;

    CovarianceState state;
    state.basis = dd.basis;
    state.c.topLeftCorner<3, 3>() = c1;
    state.c.topRightCorner<3, 3>() = 0.5 * (c2 + c2.transpose());
    state.c.bottomLeftCorner<3, 3>() = state.c.topRightCorner<3, 3>().conjugate();
    state.c.bottomRightCorner<3, 3>() = c1.transpose();
    state.d.head<3>() = d_top;
    state.d.tail<3>() = d_top.conjugate();
    state.t = 0.0;
    state.validate();
    return state;
}

BathDiscretization BathDiscretization::uniform(const ChainParams& params,
                                               int k,
                                               double omega_max_factor) {
    params.validate();
    if (k < 1)
        throw std::invalid_argument(
            "BathDiscretization::uniform: need at least one mode");
    if (!(omega_max_factor > 0.0))
        throw std::invalid_argument(
            "BathDiscretization::uniform: omega_max_factor must be positive");
    BathDiscretization disc;
    disc.modes_per_bath = k;
    disc.omega_max = omega_max_factor * params.omega_c;
    const double step = disc.omega_max / k;
    disc.frequencies.resize(k);
    disc.couplings.resize(k);
    for (int i = 0; i < k; ++i) {
        const double w = (i + 0.5) * step;
        disc.frequencies[i] = w;
        disc.couplings[i] = std::sqrt(spectral_density(w, params.omega_c) * step);
    }
    return disc;
}

double BathDiscretization::recurrence_time() const {
    if (frequencies.size() < 2) return std::numeric_limits<double>::infinity();
    return 2.0 * std::acos(-1.0) / (frequencies[1] - frequencies[0]);
}

void BathDiscretization::validate(const ChainParams& params) const {
    if (modes_per_bath < 1 ||
        frequencies.size() != static_cast<std::size_t>(modes_per_bath) ||
        couplings.size() != frequencies.size())
        throw std::invalid_argument("BathDiscretization: inconsistent sizes");
    double coupling_sum = 0.0;
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        if (frequencies[i] <= 0.0 ||
            (i > 0 && frequencies[i] <= frequencies[i - 1]))
            throw std::invalid_argument(
                "BathDiscretization: frequencies must be positive increasing");
        if (!(couplings[i] >= 0.0))
            throw std::invalid_argument(
                "BathDiscretization: couplings must be nonnegative");
        coupling_sum += couplings[i] * couplings[i];
    }
    if (modes_per_bath >= 256) {
        const double u = omega_max / params.omega_c;
        const double exact = params.omega_c * params.omega_c *
                             (1.0 - std::exp(-u) * (1.0 + u));
        if (std::abs(coupling_sum - exact) > 0.01 * exact)
            throw std::invalid_argument(
                "BathDiscretization: coupling sum rule violated beyond 1%");
    }
}

ExactTrajectory exact_reference(const ChainParams& params,
                                const BathDiscretization& disc,
                                const CovarianceState& state0, double t_end,
                                double tol,
                                const std::vector<double>& sample_times) {
    (void)tol;
    params.validate();
    disc.validate(params);
    const CovarianceState start =
        state0.basis == Basis::site
            ? state0
            : to_site_basis(state0, normal_modes(params));
    start.validate();
    if (!(t_end >= start.t))
        throw std::invalid_argument(
            "exact_reference: t_end must not precede the state time");

    const int k = disc.modes_per_bath;
    const int dim = 3 + 2 * k;
    Eigen::MatrixXd h_tot = Eigen::MatrixXd::Zero(dim, dim);
    h_tot.topLeftCorner<3, 3>() = site_hamiltonian(params);
    for (int i = 0; i < k; ++i) {
        h_tot(3 + i, 3 + i) = disc.frequencies[i];
        h_tot(3 + k + i, 3 + k + i) = disc.frequencies[i];
        const double coupling = params.lambda * disc.couplings[i];
        h_tot(0, 3 + i) = h_tot(3 + i, 0) = coupling;
        h_tot(2, 3 + k + i) = h_tot(3 + k + i, 2) = coupling;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_tot);
    const Eigen::MatrixXd& v = es.eigenvectors();
    const Eigen::VectorXd& freq = es.eigenvalues();
    const Eigen::MatrixXd v3 = v.topRows<3>();

    Eigen::VectorXd occ_left(k), occ_right(k);
    for (int i = 0; i < k; ++i) {
        occ_left(i) = mean_photon(disc.frequencies[i], params.temp_left);
        occ_right(i) = mean_photon(disc.frequencies[i], params.temp_right);
    }
    const Eigen::Matrix3cd n0 =
        0.5 * (start.c.topLeftCorner<3, 3>() - Eigen::Matrix3cd::Identity());
    const Eigen::Matrix3cd s0 = 0.5 * start.c.topRightCorner<3, 3>();
    const Eigen::Vector3cd d0 = start.d.head<3>();

    ExactTrajectory out;
    out.recurrence_time = disc.recurrence_time();
    out.recurrence_exceeded = t_end - start.t > out.recurrence_time;
    out.states.reserve(sample_times.size() + 1);
    out.states.push_back(start);

    Eigen::MatrixXcd rows3(3, dim);
    for (double t_sample : sample_times) {
        if (t_sample < start.t - 1e-12 || t_sample > t_end + 1e-12)
            throw std::invalid_argument(
                "exact_reference: sample time outside [t0, t_end]");
        const double tau = t_sample - start.t;
        Eigen::MatrixXcd v3_phased(3, dim);
        for (int c = 0; c < dim; ++c) {
            const cd phase = std::polar(1.0, -freq(c) * tau);
            v3_phased.col(c) = v3.col(c) * phase;
        }
        rows3.noalias() = v3_phased * v.transpose();

        const Eigen::Matrix3cd a = rows3.leftCols<3>();
        const auto b_left = rows3.middleCols(3, k);
        const auto b_right = rows3.rightCols(k);
        Eigen::Matrix3cd n_t = a * n0 * a.adjoint();
        n_t += b_left * occ_left.asDiagonal() * b_left.adjoint();
        n_t += b_right * occ_right.asDiagonal() * b_right.adjoint();
        Eigen::Matrix3cd s_t = a * s0 * a.transpose();
        s_t = 0.5 * (s_t + s_t.transpose()).eval();

        CovarianceState state;
        state.basis = Basis::site;
        state.t = t_sample;
        Eigen::Matrix3cd c1 = 2.0 * n_t + Eigen::Matrix3cd::Identity();
        c1 = 0.5 * (c1 + c1.adjoint()).eval();
        state.c.topLeftCorner<3, 3>() = c1;
        state.c.topRightCorner<3, 3>() = 2.0 * s_t;
        state.c.bottomLeftCorner<3, 3>() = 2.0 * s_t.conjugate();
        state.c.bottomRightCorner<3, 3>() = c1.transpose();
        state.d.head<3>() = a * d0;
        state.d.tail<3>() = state.d.head<3>().conjugate();
        state.validate();
        out.states.push_back(std::move(state));
    }
    return out;
}

ExactTrajectory exact_reference(const ChainParams& params,
                                const BathDiscretization& disc,
                                const CovarianceState& state0, double t_end,
                                double tol) {
    return exact_reference(params, disc, state0, t_end, tol, {t_end});
}

}  // namespace oqs
