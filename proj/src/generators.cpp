// generators.cpp — generator builders and the finite-window quadrature pass.
#include "oqs/generators.hpp"

#include <array>
#include <cmath>

namespace oqs {

namespace {

using Eigen::Matrix3cd;
using Eigen::Matrix3d;
using cd = std::complex<double>;

double sinc(double z) {
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

Eigen::Vector3cd window_phases(const NormalModes& modes, double delta_t) {
    Eigen::Vector3cd u;
    for (int i = 0; i < 3; ++i)
        u(i) = std::polar(1.0, 0.5 * modes.epsilon[i] * delta_t);
    return u;
}

// One quadrature pass over the shared node set.  All matrices are real
// "window" matrices before the phases are attached: gm/gp entries are
// (dt/4) int f^-/+_ij s_i s_j, and sp/sm are the two halves of the Lamb
// correction, sp_ij = 1/4 int f+_ij G_ij and sm_ij = -1/4 int f-_ij G_ij,
// so that sp + sm^T is the full real correction.  lambda^2 not included.
struct WindowPass {
    Matrix3d gm[2], gp[2], sp[2], sm[2];  // index 0 = left, 1 = right bath
    Matrix3d sigma(int b) const { return sp[b] + sm[b].transpose(); }
};

WindowPass window_quadrature(const ChainParams& params, double delta_t,
                             const QuadratureSpec& quad) {
    params.validate();
    quad.validate();
    if (!(delta_t > 0.0))
        throw std::invalid_argument("window_quadrature: delta_t must be > 0");
    const NormalModes modes = normal_modes(params);
    const double wc = params.omega_c;
    const PanelNodes nodes =
        panel_nodes(oscillatory_breakpoints(modes, wc, delta_t, quad));
    const std::size_t nn = nodes.x.size();

    // kernel arrays on the shared nodes; the even cutoff keeps the rate
    // kernels sign-definite over the negative half of the window
    std::vector<double> jt(nn), km[2], kp[2];
    std::array<std::vector<double>, 3> s;
    km[0].resize(nn);
    km[1].resize(nn);
    kp[0].resize(nn);
    kp[1].resize(nn);
    for (auto& si : s) si.resize(nn);
    const double temps[2] = {params.temp_left, params.temp_right};
    for (std::size_t k = 0; k < nn; ++k) {
        const double x = nodes.x[k];
        jt[k] = spectral_density_even(x, wc);
        for (int b = 0; b < 2; ++b) {
            km[b][k] = thermal_kernel(x, temps[b], wc, true);
            kp[b][k] = km[b][k] + jt[k];
        }
        for (int i = 0; i < 3; ++i)
            s[i][k] = sinc(0.5 * (x - modes.epsilon[i]) * delta_t);
    }

    // G_ij(w) = K_ij(w)/(eps_j - w); the pole is removable and the kernel is
    // symmetric under (i <-> j, denominators swapped), so each node uses the
    // branch whose denominator is larger, with a series on the diagonal
    auto g_kernel = [&](int i, int j, std::size_t k) {
        const double x = nodes.x[k];
        const double ei = modes.epsilon[i];
        const double ej = modes.epsilon[j];
        if (std::abs(ei - ej) < 1e-12) {
            const double z = (x - ei) * delta_t;
            if (std::abs(z) < 0.08)
                return -delta_t * (z / 6.0) *
                       (1.0 - z * z / 20.0 + z * z * z * z / 840.0);
            return (1.0 - sinc(z)) / (ei - x);
        }
        const double gap = sinc(0.5 * (ei - ej) * delta_t);
        if (std::abs(x - ej) < std::abs(x - ei)) {
            const double kji = gap - std::cos(0.5 * (x - ei) * delta_t) * s[j][k];
            return kji / (ei - x);
        }
        const double kij = gap - std::cos(0.5 * (x - ej) * delta_t) * s[i][k];
        return kij / (ej - x);
    };

    // f-table entry for bath b and the given sign; the odd rows carry the
    // absorption kernel of that bath only, with the left bath entering with a
    // minus sign and no sign dependence
    auto f_entry = [&](int b, int sign, int i, int j, std::size_t k) {
        const std::vector<double>& diag = sign > 0 ? kp[b] : km[b];
        if (i == j) return (i == 1 ? 2.0 : 1.0) * diag[k];
        if (std::abs(i - j) == 2) return diag[k];
        return sqrt2 * (b == 1 ? km[1][k] : -km[0][k]);
    };

    WindowPass out;
    for (int b = 0; b < 2; ++b) {
        for (int sign : {+1, -1}) {
            Matrix3d& m = sign > 0 ? out.gp[b] : out.gm[b];
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) {
                    double acc = 0.0;
                    for (std::size_t k = 0; k < nn; ++k)
                        acc += nodes.w[k] * f_entry(b, sign, i, j, k) *
                               s[i][k] * s[j][k];
                    m(i, j) = m(j, i) = 0.25 * delta_t * acc;
                }
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double plus = 0.0, minus = 0.0;
                for (std::size_t k = 0; k < nn; ++k) {
                    plus += nodes.w[k] * f_entry(b, +1, i, j, k) * g_kernel(i, j, k);
                    minus += nodes.w[k] * f_entry(b, -1, i, j, k) * g_kernel(i, j, k);
                }
                out.sp[b](i, j) = 0.25 * plus;
                out.sm[b](i, j) = -0.25 * minus;
            }
    }
    return out;
}

Matrix3cd phase_minus(const Matrix3d& m, const Eigen::Vector3cd& u) {
    // U m U^dag, U = diag(u)
    Matrix3cd out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out(i, j) = u(i) * m(i, j) * std::conj(u(j));
    return out;
}

Matrix3cd phase_plus(const Matrix3d& m, const Eigen::Vector3cd& u) {
    // U^dag m U
    Matrix3cd out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out(i, j) = std::conj(u(i)) * m(i, j) * u(j);
    return out;
}

}  // namespace

GeneratorCoefficients build_local(const ChainParams& params,
                                  const QuadratureSpec& quad) {
    params.validate();
    const double w0 = params.omega0;
    const double j0 = spectral_density(w0, params.omega_c);
    const double nl = mean_photon(w0, params.temp_left);
    const double nr = mean_photon(w0, params.temp_right);
    const double scale = tcg_rate_calibration * params.lambda * params.lambda;
    const double s0 = lamb_shift_pv(w0, params, quad);

    GeneratorCoefficients out;
    out.basis = Basis::site;
    out.label = "local";
    out.h_eff = site_hamiltonian(params).cast<cd>();
    out.h_eff(0, 0) += params.lambda * params.lambda * s0;
    out.h_eff(2, 2) += params.lambda * params.lambda * s0;
    out.gamma_minus.diagonal() << scale * j0 * nl, 0.0, scale * j0 * nr;
    out.gamma_plus.diagonal() << scale * j0 * (nl + 1.0), 0.0,
        scale * j0 * (nr + 1.0);
    return out;
}

GeneratorSplit global_bath_components(const ChainParams& params,
                                      const QuadratureSpec& quad) {
    params.validate();
    GeneratorSplit split;
    split.modes = normal_modes(params);
    const bool drop = !params.resonant_gap_positive();
    const double weight[3] = {0.25, 0.5, 0.25};
    const double scale = tcg_rate_calibration * params.lambda * params.lambda;
    BathComponents* baths[2] = {&split.left, &split.right};
    const double temps[2] = {params.temp_left, params.temp_right};
    for (int i = 0; i < 3; ++i) {
        if (i == 0 && drop) continue;
        const double e = split.modes.epsilon[i];
        const double j = spectral_density(e, params.omega_c);
        const double shift =
            0.5 * params.lambda * params.lambda * lamb_shift_pv(e, params, quad);
        for (int b = 0; b < 2; ++b) {
            const double nb = mean_photon(e, temps[b]);
            baths[b]->gamma_minus(i, i) = scale * weight[i] * j * nb;
            baths[b]->gamma_plus(i, i) = scale * weight[i] * j * (nb + 1.0);
            baths[b]->h_ls(i, i) = shift;
        }
    }
    return split;
}

GeneratorCoefficients build_global(const ChainParams& params,
                                   const QuadratureSpec& quad) {
    const GeneratorSplit split = global_bath_components(params, quad);
    GeneratorCoefficients out;
    out.basis = Basis::normal;
    out.label = "global";
    out.h_eff = split.left.h_ls + split.right.h_ls;
    for (int i = 0; i < 3; ++i) out.h_eff(i, i) += split.modes.epsilon[i];
    out.gamma_plus = split.left.gamma_plus + split.right.gamma_plus;
    out.gamma_minus = split.left.gamma_minus + split.right.gamma_minus;
    return out;
}

std::pair<Matrix3cd, Matrix3cd> tcg_rates(const ChainParams& params,
                                          double delta_t,
                                          const QuadratureSpec& quad) {
    const WindowPass pass = window_quadrature(params, delta_t, quad);
    const NormalModes modes = normal_modes(params);
    const Eigen::Vector3cd u = window_phases(modes, delta_t);
    const Matrix3d gp = pass.gp[0] + pass.gp[1];
    const Matrix3d gm = pass.gm[0] + pass.gm[1];
    return {phase_plus(gp, u) / tcg_rate_calibration,
            phase_minus(gm, u) / tcg_rate_calibration};
}

std::pair<Matrix3cd, Matrix3cd> tcg_lamb_shift(const ChainParams& params,
                                               double delta_t,
                                               const QuadratureSpec& quad) {
    const WindowPass pass = window_quadrature(params, delta_t, quad);
    const NormalModes modes = normal_modes(params);
    const Eigen::Vector3cd u = window_phases(modes, delta_t);
    // s_plus and s_minus carry opposite phase directions, so that
    // s_plus + s_minus^T is the phase conjugation of the real combination
    return {phase_minus(pass.sp[0] + pass.sp[1], u),
            phase_plus(pass.sm[0] + pass.sm[1], u)};
}

GeneratorSplit tcg_bath_components(const ChainParams& params, double delta_t,
                                   const QuadratureSpec& quad) {
    const WindowPass pass = window_quadrature(params, delta_t, quad);
    GeneratorSplit split;
    split.modes = normal_modes(params);
    const Eigen::Vector3cd u = window_phases(split.modes, delta_t);
    const double lam2 = params.lambda * params.lambda;
    BathComponents* baths[2] = {&split.left, &split.right};
    for (int b = 0; b < 2; ++b) {
        baths[b]->gamma_minus = lam2 * phase_minus(pass.gm[b], u);
        baths[b]->gamma_plus = lam2 * phase_plus(pass.gp[b], u);
        baths[b]->h_ls = lam2 * phase_minus(pass.sigma(b), u);
    }
    return split;
}

GeneratorCoefficients build_tcg(const ChainParams& params, double delta_t,
                                const QuadratureSpec& quad) {
    const GeneratorSplit split = tcg_bath_components(params, delta_t, quad);
    GeneratorCoefficients out;
    out.basis = Basis::normal;
    out.label = "tcg";
    out.delta_t = delta_t;
    out.h_eff = split.left.h_ls + split.right.h_ls;
    for (int i = 0; i < 3; ++i) out.h_eff(i, i) += split.modes.epsilon[i];
    out.gamma_plus = split.left.gamma_plus + split.right.gamma_plus;
    out.gamma_minus = split.left.gamma_minus + split.right.gamma_minus;
    return out;
}

GeneratorCoefficients to_site_basis(const GeneratorCoefficients& coeffs) {
    if (coeffs.basis != Basis::normal)
        throw std::invalid_argument(
            "to_site_basis: coefficients are already in the site basis");
    const Matrix3d t = normal_modes(ChainParams{}).bogolubov;
    GeneratorCoefficients out = coeffs;
    out.basis = Basis::site;
    out.h_eff = t.transpose() * coeffs.h_eff * t;
    out.gamma_plus = t.transpose() * coeffs.gamma_plus * t;
    out.gamma_minus = t.transpose() * coeffs.gamma_minus * t;
    return out;
}

}  // namespace oqs
