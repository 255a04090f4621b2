// acceptance_main.cpp — end-to-end acceptance battery; prints one PASS/FAIL
// line per criterion with supporting measurements.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oqs/chain_params.hpp"
#include "oqs/cli_commands.hpp"
#include "oqs/config.hpp"
#include "oqs/dynamics.hpp"
#include "oqs/generators.hpp"
#include "oqs/quadrature.hpp"
#include "oqs/transport.hpp"

using namespace oqs;
using cd = std::complex<double>;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

CovarianceState probe_state() {
    CovarianceState s = CovarianceState::vacuum(Basis::site);
    const double z = 0.3;
    s.c(0, 0) = std::cosh(2.0 * z);
    s.c(3, 3) = std::cosh(2.0 * z);
    s.c(0, 3) = -std::sinh(2.0 * z);
    s.c(3, 0) = -std::sinh(2.0 * z);
    s.d(0) = cd(0.8, 0.0);
    s.d(1) = cd(-0.4, 0.0);
    s.d(2) = cd(0.0, 0.3);
    s.d.tail<3>() = s.d.head<3>().conjugate();
    return s;
}

CovarianceState steady_of(const GeneratorCoefficients& gen) {
    const DriftDiffusion dd = build_drift_diffusion(gen);
    if (dd.max_re_eig() < -1e-10) return steady_state(dd);
    return steady_state(dd, CovarianceState::vacuum(dd.basis));
}

// uniform five-point window around t_center from the given start state
std::vector<CovarianceState> fd_window(const CovarianceState& s0,
                                       const DriftDiffusion& dd,
                                       double t_center, double h) {
    const std::vector<double> samples = {t_center - 2 * h, t_center - h,
                                         t_center, t_center + h,
                                         t_center + 2 * h};
    auto traj = evolve(s0, dd, samples.back(), 1e-12, samples);
    traj.erase(traj.begin());
    return traj;
}

bool criterion_1() {
    const ChainParams p;
    const QuadratureSpec quad;
    const NormalModes nm = normal_modes(p);
    const auto t0 = std::chrono::steady_clock::now();
    const CovarianceState ss =
        steady_state(build_drift_diffusion(build_global(p, quad)));
    const double elapsed = seconds_since(t0);

    Eigen::Matrix3cd closed = Eigen::Matrix3cd::Identity();
    for (int i = 0; i < 3; ++i)
        closed(i, i) += mean_photon(nm.epsilon[i], p.temp_left) +
                        mean_photon(nm.epsilon[i], p.temp_right);

    const double err_modes =
        (ss.c.topLeftCorner<3, 3>() - closed).cwiseAbs().maxCoeff();
    const CovarianceState site = to_site_basis(ss, nm);
    const Eigen::Matrix3cd t = nm.bogolubov.cast<cd>();
    const double err_site = (site.c.topLeftCorner<3, 3>() -
                             t.transpose() * closed * t)
                                .cwiseAbs()
                                .maxCoeff();
    const double err_flipped =
        (site.c.topLeftCorner<3, 3>() - t * closed * t.transpose())
            .cwiseAbs()
            .maxCoeff();
    std::printf("    mode-basis error %.3e, site-basis error %.3e, solve "
                "%.3f s\n",
                err_modes, err_site, elapsed);
    std::printf("    (transpose-flipped rotation differs by %.3e, shown for "
                "orientation reference)\n",
                err_flipped);
    return err_modes < 1e-10 && err_site < 1e-10 && elapsed < 1.0;
}

bool criterion_2() {
    const QuadratureSpec quad;
    bool pass = true;
    for (double g : {0.3, 0.5, 0.8}) {
        ChainParams p;
        p.g = g;
        const NormalModes nm = normal_modes(p);
        const CovarianceState ss = steady_of(build_global(p, quad));
        const EnergySinkSource q = energy_rhs_global(ss, p, quad);
        const double balance = std::abs(q.q_left + q.q_right);
        double closed = 0.0;
        for (int i : {0, 2})
            closed += mean_photon(nm.epsilon[i], p.temp_left) -
                      mean_photon(nm.epsilon[i], p.temp_right);
        closed *= 0.5 * M_PI * p.lambda * p.lambda;
        const double closed_err = std::abs(q.q_left - closed);
        std::printf("    g=%.2f global: |q_left+q_right|=%.3e, "
                    "q_left=%.6e, closed form %.6e (|diff|=%.3e)\n",
                    g, balance, q.q_left, closed, closed_err);
        if (balance > 1e-8 || closed_err > 1e-8) pass = false;
        for (double dt : {1.0, 100.0, 1e4}) {
            try {
                const CovarianceState st = steady_of(build_tcg(p, dt, quad));
                const EnergySinkSourceTcg qt = energy_rhs_tcg(st, p, dt, quad);
                const double bal = std::abs(qt.q_left + qt.q_right);
                std::printf("    g=%.2f tcg dt=%g: |q_left+q_right|=%.3e\n",
                            g, dt, bal);
                if (bal > 1e-8) pass = false;
            } catch (const std::exception& ex) {
                std::printf("    g=%.2f tcg dt=%g: no steady state (%s)\n", g,
                            dt, ex.what());
                pass = false;
            }
        }
    }
    return pass;
}

bool criterion_3() {
    const ChainParams p;
    const QuadratureSpec quad;
    const NormalModes nm = normal_modes(p);
    bool pass = true;
    {
        const CovarianceState site =
            to_site_basis(steady_of(build_global(p, quad)), nm);
        const double j12 = excitation_current(site, 1, 2);
        const double j23 = excitation_current(site, 2, 3);
        std::printf("    global: |J12|=%.3e |J23|=%.3e\n", std::abs(j12),
                    std::abs(j23));
        if (std::abs(j12) > 1e-8 || std::abs(j23) > 1e-8) pass = false;
    }
    for (double dt : {1.0, 100.0, 1e4}) {
        const CovarianceState site =
            to_site_basis(steady_of(build_tcg(p, dt, quad)), nm);
        const double j12 = excitation_current(site, 1, 2);
        const double j23 = excitation_current(site, 2, 3);
        std::printf("    tcg dt=%g: |J12|=%.3e |J23|=%.3e\n", dt,
                    std::abs(j12), std::abs(j23));
        if (std::abs(j12) > 1e-8 || std::abs(j23) > 1e-8) pass = false;
    }
    return pass;
}

struct SweepRow {
    double dt, ql, qr;
};

bool criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig cfg;
    cfg.approaches = {Approach::tcg};
    cfg.delta_t_grid = default_delta_t_grid();
    const fs::path out =
        fs::temp_directory_path() / "oqs_acceptance_sweep";
    fs::remove_all(out);
    fs::create_directories(out);
    cfg.out_dir = out.string();
    cfg.validate();
    const int rc = cmd_sweep_dt(cfg, 0);
    const double elapsed = seconds_since(t0);
    if (rc != 0) {
        std::printf("    sweep command failed with exit code %d\n", rc);
        return false;
    }

    std::vector<SweepRow> tcg;
    SweepRow glb{0.0, 0.0, 0.0};
    bool have_glb = false;
    std::ifstream in(out / "sweep_dt.csv");
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string approach, field;
        std::getline(ss, approach, ',');
        SweepRow row{};
        std::getline(ss, field, ',');
        row.dt = std::stod(field);
        std::getline(ss, field, ',');
        row.ql = std::stod(field);
        std::getline(ss, field, ',');
        row.qr = std::stod(field);
        if (approach == "tcg") {
            tcg.push_back(row);
        } else {
            glb = row;
            have_glb = true;
        }
    }
    fs::remove_all(out);
    if (!have_glb || tcg.size() < 6) {
        std::printf("    sweep table incomplete (%zu window rows)\n",
                    tcg.size());
        return false;
    }
    std::sort(tcg.begin(), tcg.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.dt < b.dt; });

    const SweepRow& first = tcg.front();
    const SweepRow& last = tcg.back();
    const double rel_l = std::abs(last.ql / glb.ql - 1.0);
    const double rel_r = std::abs(last.qr / glb.qr - 1.0);
    const double small_l = std::abs(first.ql) / std::abs(glb.ql);
    const double small_r = std::abs(first.qr) / std::abs(glb.qr);
    // the curves cross their limits repeatedly (oscillatory window factors),
    // so the tails are judged on the decade-sampled envelope
    auto nearest = [&](double target) {
        const SweepRow* best = &tcg.front();
        for (const SweepRow& row : tcg)
            if (std::abs(std::log(row.dt / target)) <
                std::abs(std::log(best->dt / target)))
                best = &row;
        return *best;
    };
    bool tail_monotone = true;
    {
        const SweepRow a = nearest(1e2), b = nearest(1e3), c = nearest(1e4);
        if (!(std::abs(a.ql - glb.ql) > std::abs(b.ql - glb.ql) &&
              std::abs(b.ql - glb.ql) > std::abs(c.ql - glb.ql)))
            tail_monotone = false;
        if (!(std::abs(a.qr - glb.qr) > std::abs(b.qr - glb.qr) &&
              std::abs(b.qr - glb.qr) > std::abs(c.qr - glb.qr)))
            tail_monotone = false;
    }
    bool head_monotone = true;
    {
        const SweepRow a = nearest(1e-2), b = nearest(1e-1), c = nearest(1.0);
        if (!(std::abs(a.ql) < std::abs(b.ql) &&
              std::abs(b.ql) < std::abs(c.ql)))
            head_monotone = false;
    }

    std::printf("    %zu windows in %.1f s; at dt=%g rel offsets %.2e / "
                "%.2e; at dt=%g magnitude ratios %.2e / %.2e\n",
                tcg.size(), elapsed, last.dt, rel_l, rel_r, first.dt, small_l,
                small_r);
    std::printf("    tail envelope decreasing: %s, head growth monotone: "
                "%s\n",
                tail_monotone ? "yes" : "no", head_monotone ? "yes" : "no");
    return rel_l < 0.01 && rel_r < 0.01 && small_l < 0.01 && small_r < 0.01 &&
           tail_monotone && head_monotone && elapsed < 300.0;
}

bool criterion_5() {
    const ChainParams p;
    const QuadratureSpec quad;
    const GeneratorCoefficients glb = build_global(p, quad);
    const double norm_p = glb.gamma_plus.norm();
    const double norm_m = glb.gamma_minus.norm();
    double prev_p = 2.0, prev_m = 2.0;
    bool monotone = true;
    double final_p = 1.0, final_m = 1.0;
    for (double dt : {1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3, 1e4}) {
        const GeneratorCoefficients t = build_tcg(p, dt, quad);
        const double dp = (t.gamma_plus - glb.gamma_plus).norm() / norm_p;
        const double dm = (t.gamma_minus - glb.gamma_minus).norm() / norm_m;
        std::printf("    dt=%-8g rel distance plus %.3e minus %.3e\n", dt, dp,
                    dm);
        if (dp >= prev_p || dm >= prev_m) monotone = false;
        prev_p = dp;
        prev_m = dm;
        final_p = dp;
        final_m = dm;
    }
    return monotone && final_p < 1e-2 && final_m < 1e-2;
}

bool criterion_6() {
    const ChainParams p;
    const QuadratureSpec quad;
    bool pass = true;
    struct Case {
        Approach approach;
        double dt;
    };
    for (const Case& c : {Case{Approach::local, 0.0},
                          Case{Approach::global, 0.0},
                          Case{Approach::tcg, 1.0}}) {
        GeneratorCoefficients gen;
        switch (c.approach) {
            case Approach::local: gen = build_local(p, quad); break;
            case Approach::global: gen = build_global(p, quad); break;
            default: gen = build_tcg(p, c.dt, quad); break;
        }
        const DriftDiffusion dd = build_drift_diffusion(gen);
        const CovarianceState vac = CovarianceState::vacuum(gen.basis);
        const double r1 = energy_continuity_residual(
            fd_window(vac, dd, 1.0, 1e-3), c.approach, p, quad, c.dt);
        const double r2 = energy_continuity_residual(
            fd_window(vac, dd, 1.0, 5e-4), c.approach, p, quad, c.dt);
        const double ratio = r1 / r2;
        std::printf("    %s: residual %.3e at step 1e-3, halving ratio "
                    "%.2f\n",
                    approach_name(c.approach).c_str(), r1, ratio);
        if (!(r1 < 1e-6) || ratio < 3.0 || ratio > 5.0) pass = false;
    }
    return pass;
}

double exact_residual(const ChainParams& p, int k, double h) {
    const QuadratureSpec quad;
    const BathDiscretization disc = BathDiscretization::uniform(p, k);
    const std::vector<double> samples = {10.0 - 2 * h, 10.0 - h, 10.0,
                                         10.0 + h, 10.0 + 2 * h};
    ExactTrajectory traj =
        exact_reference(p, disc, CovarianceState::vacuum(Basis::site),
                        samples.back(), 1e-12, samples);
    traj.states.erase(traj.states.begin());
    return energy_continuity_residual(traj.states, Approach::exact, p, quad);
}

bool criterion_7() {
    const ChainParams p;
    const double r512 = exact_residual(p, 512, 1e-3);
    const double r1024 = exact_residual(p, 1024, 1e-3);
    std::printf("    residual %.3e at K=512 (bound 1e-5), %.3e at K=1024 "
                "(bound 5e-6)\n",
                r512, r1024);
    return r512 < 1e-5 && r1024 < 5e-6;
}

bool criterion_8() {
    const ChainParams p;
    const QuadratureSpec quad;
    double worst_rate = 1.0;
    std::vector<GeneratorCoefficients> gens = {build_local(p, quad),
                                               build_global(p, quad)};
    for (double dt : {1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3, 1e4})
        gens.push_back(build_tcg(p, dt, quad));
    for (const GeneratorCoefficients& gen : gens)
        for (const Eigen::Matrix3cd* gamma :
             {&gen.gamma_plus, &gen.gamma_minus})
            worst_rate = std::min(
                worst_rate,
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd>(*gamma)
                    .eigenvalues()
                    .minCoeff());

    double worst_eig = 1.0, worst_diag = 2.0;
    auto scan = [&](const std::vector<CovarianceState>& traj) {
        for (const CovarianceState& s : traj) {
            worst_eig = std::min(
                worst_eig, Eigen::SelfAdjointEigenSolver<Matrix6cd>(
                               s.c, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff());
            for (int i = 0; i < 3; ++i)
                worst_diag = std::min(worst_diag, s.c(i, i).real());
        }
    };
    std::vector<double> samples;
    for (int k = 1; k <= 20; ++k) samples.push_back(0.25 * k);
    for (const GeneratorCoefficients& gen :
         {build_local(p, quad), build_global(p, quad),
          build_tcg(p, 1.0, quad)}) {
        const DriftDiffusion dd = build_drift_diffusion(gen);
        scan(evolve(CovarianceState::vacuum(gen.basis), dd, 5.0, 1e-12,
                    samples));
        CovarianceState s0 = probe_state();
        if (gen.basis == Basis::normal)
            s0 = to_normal_basis(s0, normal_modes(p));
        scan(evolve(s0, dd, 5.0, 1e-12, samples));
    }
    const BathDiscretization disc = BathDiscretization::uniform(p, 512);
    scan(exact_reference(p, disc, CovarianceState::vacuum(Basis::site), 5.0,
                         1e-12, samples)
             .states);
    scan(exact_reference(p, disc, probe_state(), 5.0, 1e-12, samples).states);

    std::printf("    min rate eigenvalue %.3e (floor -1e-10), min state "
                "eigenvalue %.3e (floor -1e-8), min occupation diagonal "
                "%.12f (floor 1-1e-8)\n",
                worst_rate, worst_eig, worst_diag);
    return worst_rate >= -1e-10 && worst_eig >= -1e-8 &&
           worst_diag >= 1.0 - 1e-8;
}

bool criterion_9() {
    const ChainParams p;
    const QuadratureSpec quad;
    bool pass = true;
    const double h = 1e-3;
    const std::vector<double> samples = {1.3 - h, 1.3, 1.3 + h};

    auto window = [&](const GeneratorCoefficients& gen) {
        CovarianceState s0 = probe_state();
        if (gen.basis == Basis::normal)
            s0 = to_normal_basis(s0, normal_modes(p));
        auto traj = evolve(s0, build_drift_diffusion(gen), samples.back(),
                           1e-12, samples);
        traj.erase(traj.begin());
        return traj;
    };

    struct Case {
        const char* name;
        GeneratorCoefficients gen;
    };
    std::vector<Case> cases;
    cases.push_back({"local", build_local(p, quad)});
    cases.push_back({"global", to_site_basis(build_global(p, quad))});
    cases.push_back({"tcg dt=1", to_site_basis(build_tcg(p, 1.0, quad))});

    double res_local_1024 = 0.0, res_local_512 = 0.0;
    for (const Case& c : cases) {
        const auto traj = window(c.gen);
        const CovarianceState mid_site =
            traj[1].basis == Basis::site
                ? traj[1]
                : to_site_basis(traj[1], normal_modes(p));
        const auto grid = default_spatial_grid(mid_site, p.omega0, 1024);
        const double res =
            probability_continuity_residual(traj, c.gen, grid, p);
        std::printf("    %s: residual %.3e on the 1024-point grid\n", c.name,
                    res);
        if (!(res < 1e-4)) pass = false;
        if (std::string(c.name) == "local") {
            res_local_1024 = res;
            const auto coarse = default_spatial_grid(mid_site, p.omega0, 512);
            res_local_512 =
                probability_continuity_residual(traj, c.gen, coarse, p);
        }
    }
    const double ratio = res_local_512 / res_local_1024;
    std::printf("    grid halving ratio %.2f (local)\n", ratio);
    if (ratio < 2.5 || ratio > 6.0) pass = false;

    {
        ChainParams closed_p = p;
        closed_p.lambda = 0.0;
        const GeneratorCoefficients closed = build_local(closed_p, quad);
        CovarianceState s0 = probe_state();
        auto traj = evolve(s0, build_drift_diffusion(closed), samples.back(),
                           1e-12, samples);
        traj.erase(traj.begin());
        const auto grid = default_spatial_grid(traj[1], p.omega0, 1024);
        const double res =
            probability_continuity_residual(traj, closed, grid, closed_p);
        std::printf("    closed chain: residual %.3e\n", res);
        if (!(res < 1e-4)) pass = false;
    }

    // sampling cross-check of the conditional-moment field formulas
    {
        const auto traj =
            evolve(probe_state(), build_drift_diffusion(build_local(p, quad)),
                   1.3, 1e-12);
        const QuadratureMoments qm =
            quadrature_covariance(traj.back(), p.omega0);
        Eigen::Matrix<double, 6, 6> cov = qm.cov;
        cov.diagonal().array() += 1e-13;
        const Eigen::Matrix<double, 6, 6> chol =
            Eigen::LLT<Eigen::Matrix<double, 6, 6>>(cov).matrixL();

        const int n_bins = 64;
        const std::size_t n_samples = 1000000;
        const double mu0 = qm.mean(0);
        const double sig0 = std::sqrt(qm.cov(0, 0));
        const double lo = mu0 - 6.0 * sig0;
        const double bw = 12.0 * sig0 / n_bins;
        std::vector<double> w_x2(n_bins, 0.0), w_p2(n_bins, 0.0);
        std::mt19937_64 rng(20240817u);
        auto unit = [&]() {
            return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
        };
        bool have = false;
        double spare = 0.0;
        auto normal = [&]() {
            if (have) {
                have = false;
                return spare;
            }
            const double r = std::sqrt(-2.0 * std::log(unit()));
            const double ph = 2.0 * M_PI * unit();
            spare = r * std::sin(ph);
            have = true;
            return r * std::cos(ph);
        };
        for (std::size_t s = 0; s < n_samples; ++s) {
            Eigen::Matrix<double, 6, 1> z;
            for (int i = 0; i < 6; ++i) z(i) = normal();
            const Eigen::Matrix<double, 6, 1> y = qm.mean + chol * z;
            const int k = static_cast<int>(std::floor((y(0) - lo) / bw));
            if (k < 0 || k >= n_bins) continue;
            w_x2[k] += y(1);
            w_p2[k] += y(4);
        }
        double err_x2 = 0.0, err_p2 = 0.0;
        const double var0 = qm.cov(0, 0);
        for (int k = 0; k < n_bins; ++k) {
            const double x = lo + (k + 0.5) * bw;
            const double pdf =
                std::exp(-0.5 * (x - mu0) * (x - mu0) / var0) /
                std::sqrt(2.0 * M_PI * var0);
            const double cond_x2 =
                qm.mean(1) + qm.cov(1, 0) / var0 * (x - mu0);
            const double cond_p2 =
                qm.mean(4) + qm.cov(4, 0) / var0 * (x - mu0);
            err_x2 = std::max(err_x2, std::abs(w_x2[k] / (n_samples * bw) -
                                               pdf * cond_x2));
            err_p2 = std::max(err_p2, std::abs(w_p2[k] / (n_samples * bw) -
                                               pdf * cond_p2));
        }
        std::printf("    sampling check: sup error %.3e (position weight), "
                    "%.3e (momentum weight)\n",
                    err_x2, err_p2);
        if (!(err_x2 < 5e-3) || !(err_p2 < 5e-3)) pass = false;
    }
    return pass;
}

bool criterion_10() {
    ChainParams p;
    p.temp_left = 5.0;
    p.temp_right = 5.0;
    const QuadratureSpec quad;
    bool pass = true;
    {
        const CovarianceState ss = steady_of(build_global(p, quad));
        const EnergySinkSource q = energy_rhs_global(ss, p, quad);
        std::printf("    global: q_left=%.3e q_right=%.3e\n", q.q_left,
                    q.q_right);
        if (std::abs(q.q_left) > 1e-10 || std::abs(q.q_right) > 1e-10)
            pass = false;
    }
    for (double dt : {1.0, 100.0}) {
        const CovarianceState ss = steady_of(build_tcg(p, dt, quad));
        const EnergySinkSourceTcg q = energy_rhs_tcg(ss, p, dt, quad);
        std::printf("    tcg dt=%g: q_left=%.3e q_right=%.3e\n", dt, q.q_left,
                    q.q_right);
        if (std::abs(q.q_left) > 1e-10 || std::abs(q.q_right) > 1e-10)
            pass = false;
    }
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance battery for the oscillator-chain library"};
    int criterion = 0;
    app.add_option("--criterion", criterion,
                   "run a single criterion (1-10); 0 runs all")
        ->check(CLI::Range(0, 10));
    CLI11_PARSE(app, argc, argv);

    using CriterionFn = bool (*)();
    const CriterionFn fns[10] = {
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};

    bool all_pass = true;
    for (int n = 1; n <= 10; ++n) {
        if (criterion != 0 && criterion != n) continue;
        bool ok = false;
        try {
            ok = fns[n - 1]();
        } catch (const std::exception& ex) {
            std::printf("    unhandled failure: %s\n", ex.what());
        }
        std::printf("criterion %d: %s\n", n, ok ? "PASS" : "FAIL");
        if (!ok) all_pass = false;
    }
    return all_pass ? 0 : 1;
}
