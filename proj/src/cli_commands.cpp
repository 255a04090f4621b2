// cli_commands.cpp — subcommand implementations behind the oqs-chain binary.
#include "oqs/cli_commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oqs/dynamics.hpp"
#include "oqs/generators.hpp"
#include "oqs/io.hpp"
#include "oqs/transport.hpp"

namespace oqs {

namespace {

using cd = std::complex<double>;

std::string out_path(const ScenarioConfig& config, const std::string& name) {
    return (std::filesystem::path(config.out_dir) / name).string();
}

std::string dt_suffix(double delta_t) {
    return "_dt" + format_double(delta_t);
}

std::vector<double> sample_grid(const ScenarioConfig& config) {
    std::vector<double> times;
    if (config.horizon <= 0.0) return times;
    const auto count = static_cast<long long>(
        std::floor(config.horizon / config.sample_step + 1e-9));
    times.reserve(static_cast<std::size_t>(std::max<long long>(count, 0)));
    for (long long k = 1; k <= count; ++k)
        times.push_back(config.sample_step * static_cast<double>(k));
    while (!times.empty() && times.back() > config.horizon) times.pop_back();
    return times;
}

// Zero-rate site coefficients standing in for the closed-chain unitary part;
// the discretized-bath trajectories reuse them for the spatial currents.
GeneratorCoefficients closed_chain_coeffs(const ChainParams& params) {
    GeneratorCoefficients coeffs;
    coeffs.basis = Basis::site;
    coeffs.label = "exact";
    coeffs.h_eff = site_hamiltonian(params).cast<cd>();
    coeffs.gamma_plus = Eigen::Matrix3cd::Zero();
    coeffs.gamma_minus = Eigen::Matrix3cd::Zero();
    return coeffs;
}

GeneratorCoefficients in_site_coeffs(const GeneratorCoefficients& coeffs) {
    return coeffs.basis == Basis::site ? coeffs : to_site_basis(coeffs);
}

// Coarse-grained coefficient set assembled from one window pass so the
// continuity evaluator shares the quadrature with the generator.
struct TcgSet {
    GeneratorCoefficients coeffs;
    GeneratorSplit split;
};

TcgSet make_tcg(const ChainParams& params, double delta_t,
                const QuadratureSpec& quad) {
    TcgSet out;
    out.split = tcg_bath_components(params, delta_t, quad);
    out.coeffs.basis = Basis::normal;
    out.coeffs.label = "tcg";
    out.coeffs.delta_t = delta_t;
    out.coeffs.h_eff = out.split.left.h_ls + out.split.right.h_ls;
    for (int i = 0; i < 3; ++i)
        out.coeffs.h_eff(i, i) += out.split.modes.epsilon[i];
    out.coeffs.gamma_plus =
        out.split.left.gamma_plus + out.split.right.gamma_plus;
    out.coeffs.gamma_minus =
        out.split.left.gamma_minus + out.split.right.gamma_minus;
    return out;
}

int resolve_threads(int requested, std::size_t items) {
    int n = requested;
    if (n <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        n = hw > 0 ? static_cast<int>(hw) : 1;
    }
    n = std::min<int>(n, static_cast<int>(std::max<std::size_t>(items, 1)));
    return std::max(n, 1);
}

double uniform_pm1(std::mt19937_64& rng) {
    const double u =
        (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    return 2.0 * u - 1.0;
}

// Random physical probe state: C1 = I + V V^dag, zero squeezing block, small
// random displacement.
CovarianceState random_probe(std::mt19937_64& rng, Basis basis) {
    Eigen::Matrix3cd v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            v(i, j) = 0.5 * cd(uniform_pm1(rng), uniform_pm1(rng));
    const Eigen::Matrix3cd c1 =
        Eigen::Matrix3cd::Identity() + v * v.adjoint();
    CovarianceState state = CovarianceState::vacuum(basis);
    state.c.topLeftCorner<3, 3>() = c1;
    state.c.bottomRightCorner<3, 3>() = c1.transpose();
    for (int i = 0; i < 3; ++i) {
        state.d(i) = 0.3 * cd(uniform_pm1(rng), uniform_pm1(rng));
        state.d(3 + i) = std::conj(state.d(i));
    }
    state.validate();
    return state;
}

}  // namespace

int cmd_coeffs(const ScenarioConfig& config) {
    for (Approach approach : config.approaches) {
        switch (approach) {
            case Approach::exact:
                break;  // no reduced-generator coefficients
            case Approach::local:
                write_coefficients_json(out_path(config, "coeffs_local.json"),
                                        build_local(config.params, config.quad));
                break;
            case Approach::global:
                write_coefficients_json(out_path(config, "coeffs_global.json"),
                                        build_global(config.params, config.quad));
                break;
            case Approach::tcg:
                for (double dt : config.delta_t_grid)
                    write_coefficients_json(
                        out_path(config,
                                 "coeffs_tcg" + dt_suffix(dt) + ".json"),
                        build_tcg(config.params, dt, config.quad));
                break;
        }
    }
    return 0;
}

int cmd_evolve(const ScenarioConfig& config) {
    const ChainParams& params = config.params;
    const NormalModes modes = normal_modes(params);
    const std::vector<double> times = sample_grid(config);
    const CovarianceState state0 = initial_state(config);

    struct Run {
        Approach approach;
        double delta_t = 0.0;
        std::string tag;
        GeneratorCoefficients field_coeffs;  // site basis
    };
    std::vector<Run> runs;
    for (Approach approach : config.approaches) {
        if (approach == Approach::tcg) {
            for (double dt : config.delta_t_grid)
                runs.push_back({approach, dt, "tcg" + dt_suffix(dt), {}});
        } else {
            runs.push_back({approach, 0.0, approach_name(approach), {}});
        }
    }

    if (times.empty()) {
        for (const Run& run : runs)
            write_trajectory_csv(
                out_path(config, "trajectory_" + run.tag + ".csv"), {}, params);
        write_transport_csv(out_path(config, "transport.csv"), {});
        return 0;
    }

    std::vector<EnergyTransportReport> transport_rows;
    for (Run& run : runs) {
        std::vector<CovarianceState> traj;
        if (run.approach == Approach::exact) {
            BathDiscretization disc = BathDiscretization::uniform(
                params, config.bath.modes_per_bath,
                config.bath.omega_max_factor);
            disc.validate(params);
            ExactTrajectory ex =
                exact_reference(params, disc, state0, config.horizon,
                                config.integrator_tol, times);
            if (ex.recurrence_exceeded)
                std::cerr << "evolve: exact trajectory passes the bath "
                             "recurrence time "
                          << format_double(ex.recurrence_time)
                          << "; later samples are unreliable\n";
            traj = std::move(ex.states);
            run.field_coeffs = closed_chain_coeffs(params);
        } else {
            GeneratorCoefficients coeffs;
            switch (run.approach) {
                case Approach::local:
                    coeffs = build_local(params, config.quad);
                    break;
                case Approach::global:
                    coeffs = build_global(params, config.quad);
                    break;
                default:
                    coeffs = build_tcg(params, run.delta_t, config.quad);
                    break;
            }
            const DriftDiffusion dd = build_drift_diffusion(coeffs);
            const CovarianceState start =
                dd.basis == state0.basis ? state0
                                         : to_normal_basis(state0, modes);
            traj = evolve(start, dd, config.horizon, config.integrator_tol,
                          times);
            run.field_coeffs = in_site_coeffs(coeffs);
        }

        write_trajectory_csv(out_path(config, "trajectory_" + run.tag + ".csv"),
                             traj, params);
        if (traj.size() >= 3) {
            const std::vector<EnergyTransportReport> rows =
                energy_transport_reports(traj, run.approach, params,
                                         config.quad, run.delta_t);
            transport_rows.insert(transport_rows.end(), rows.begin(),
                                  rows.end());
        }

        const CovarianceState final_site =
            traj.back().basis == Basis::site
                ? traj.back()
                : to_site_basis(traj.back(), modes);
        const std::vector<double> grid =
            default_spatial_grid(final_site, params.omega0);
        const SpatialField field = probability_currents(
            final_site, run.field_coeffs, grid, params);
        write_spatial_csv(out_path(config, "spatial_" + run.tag + ".csv"),
                          field);
        write_state_json(out_path(config, "state_" + run.tag + ".json"),
                         final_site);
    }
    write_transport_csv(out_path(config, "transport.csv"), transport_rows);
    return 0;
}

int cmd_sweep_dt(const ScenarioConfig& config, int threads) {
    if (!config.has_approach(Approach::tcg) || config.delta_t_grid.empty()) {
        std::cerr << "sweep-dt: config must request the tcg approach with a "
                     "delta_t grid\n";
        return 2;
    }
    const ChainParams& params = config.params;
    const QuadratureSpec& quad = config.quad;
    const std::vector<double>& grid = config.delta_t_grid;

    struct Row {
        double delta_t = 0.0;
        double q_left = 0.0;
        double q_right = 0.0;
        bool ok = false;
        std::string error;
    };
    std::vector<Row> rows(grid.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= grid.size()) return;
            Row& row = rows[i];
            row.delta_t = grid[i];
            try {
                const TcgSet set = make_tcg(params, grid[i], quad);
                const DriftDiffusion dd = build_drift_diffusion(set.coeffs);
                const CovarianceState steady = steady_state(dd);
                const EnergyRhsEvaluator eval(set.split);
                const EnergySinkSourceTcg terms = eval.evaluate(steady);
                row.q_left = terms.q_left;
                row.q_right = terms.q_right;
                row.ok = true;
            } catch (const std::exception& err) {
                row.error = err.what();
            }
        }
    };
    const int n_threads = resolve_threads(threads, grid.size());
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads - 1));
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();

    double global_left = 0.0;
    double global_right = 0.0;
    bool global_ok = false;
    std::string global_error;
    try {
        const DriftDiffusion dd =
            build_drift_diffusion(build_global(params, quad));
        const CovarianceState steady =
            params.resonant_gap_positive()
                ? steady_state(dd)
                : steady_state(dd, CovarianceState::vacuum(Basis::normal));
        const EnergySinkSource terms = energy_rhs_global(steady, params, quad);
        global_left = terms.q_left;
        global_right = terms.q_right;
        global_ok = true;
    } catch (const std::exception& err) {
        global_error = err.what();
    }

    std::ostringstream csv;
    csv << "approach,delta_t,q_left,q_right\n";
    std::size_t failures = 0;
    for (const Row& row : rows) {
        if (!row.ok) {
            ++failures;
            std::cerr << "sweep-dt: delta_t=" << format_double(row.delta_t)
                      << " failed: " << row.error << "\n";
            continue;
        }
        csv << "tcg," << format_double(row.delta_t) << ","
            << format_double(row.q_left) << "," << format_double(row.q_right)
            << "\n";
    }
    if (global_ok) {
        for (double dt : {grid.front(), grid.back()})
            csv << "global," << format_double(dt) << ","
                << format_double(global_left) << ","
                << format_double(global_right) << "\n";
    } else {
        ++failures;
        std::cerr << "sweep-dt: global reference failed: " << global_error
                  << "\n";
    }
    write_text_file(out_path(config, "sweep_dt.csv"), csv.str());
    if (failures > 0) {
        std::cerr << "sweep-dt: " << failures << " of " << grid.size() + 1
                  << " computations failed\n";
        return 3;
    }
    return 0;
}

int cmd_check(const ScenarioConfig& config, bool debug_corrupt_gamma) {
    const ChainParams& params = config.params;
    const QuadratureSpec& quad = config.quad;
    const NormalModes modes = normal_modes(params);
    const bool damped_gap = params.resonant_gap_positive();

    struct CheckResult {
        std::string name;
        bool passed = false;
        std::string detail;
    };
    std::vector<CheckResult> results;
    auto add = [&](const std::string& name, bool passed,
                   const std::string& detail) {
        results.push_back({name, passed, detail});
    };
    auto fmt = [](double v) { return format_double(v); };

    const GeneratorCoefficients local = build_local(params, quad);
    const GeneratorCoefficients global = build_global(params, quad);
    const std::vector<double> probe_dts{1e-2, 1.0, 1e2, 1e4};
    std::vector<TcgSet> tcg_sets;
    tcg_sets.reserve(probe_dts.size());
    for (double dt : probe_dts) tcg_sets.push_back(make_tcg(params, dt, quad));

    // rate matrices stay positive semidefinite
    {
        double worst = 0.0;
        std::string where = "none";
        auto scan = [&](const GeneratorCoefficients& coeffs,
                        const std::string& label) {
            for (const Eigen::Matrix3cd* gamma :
                 {&coeffs.gamma_plus, &coeffs.gamma_minus}) {
                const double lo = Eigen::SelfAdjointEigenSolver<
                                      Eigen::Matrix3cd>(*gamma)
                                      .eigenvalues()
                                      .minCoeff();
                if (lo < worst) {
                    worst = lo;
                    where = label;
                }
            }
        };
        if (debug_corrupt_gamma) {
            GeneratorCoefficients corrupted = local;
            corrupted.gamma_minus(0, 0) =
                -std::abs(corrupted.gamma_minus(0, 0)) - 0.1;
            scan(corrupted, "local (corrupted)");
        }
        scan(local, "local");
        scan(global, "global");
        for (std::size_t i = 0; i < tcg_sets.size(); ++i)
            scan(tcg_sets[i].coeffs, "tcg" + dt_suffix(probe_dts[i]));
        add("rate_psd", worst >= -1e-10,
            "lowest rate eigenvalue " + fmt(worst) + " (" + where + ")");
    }

    // h_eff Hermitian, gamma matrices Hermitian
    {
        double worst = 0.0;
        auto scan = [&](const GeneratorCoefficients& coeffs) {
            for (const Eigen::Matrix3cd* m :
                 {&coeffs.h_eff, &coeffs.gamma_plus, &coeffs.gamma_minus})
                worst = std::max(worst,
                                 (*m - m->adjoint()).cwiseAbs().maxCoeff());
        };
        scan(local);
        scan(global);
        for (const TcgSet& set : tcg_sets) scan(set.coeffs);
        add("coefficient_hermiticity", worst <= 1e-12,
            "largest Hermiticity defect " + fmt(worst));
    }

    const DriftDiffusion dd_local = build_drift_diffusion(local);
    const DriftDiffusion dd_global = build_drift_diffusion(global);
    CovarianceState steady_local;
    CovarianceState steady_global;
    bool steady_ok = true;
    try {
        steady_local = steady_state(dd_local);
        steady_global =
            damped_gap
                ? steady_state(dd_global)
                : steady_state(dd_global, CovarianceState::vacuum(Basis::normal));
    } catch (const std::exception& err) {
        steady_ok = false;
        add("steady_solve", false, err.what());
    }

    // secular steady state matches the mode-thermalization closed form
    if (steady_ok) {
        Eigen::Matrix3cd expected = Eigen::Matrix3cd::Identity();
        for (int i = 0; i < 3; ++i) {
            if (!damped_gap && i == 0) continue;  // frozen vacuum entry stays 1
            expected(i, i) += mean_photon(modes.epsilon[i], params.temp_left) +
                              mean_photon(modes.epsilon[i], params.temp_right);
        }
        const double err = (steady_global.c.topLeftCorner<3, 3>() - expected)
                               .cwiseAbs()
                               .maxCoeff();
        add("steady_closed_form", err <= 1e-10,
            "largest deviation " + fmt(err) +
                (damped_gap ? "" : " (damped channels only)"));
    }

    // stationarity residual of the linear solve
    if (steady_ok) {
        auto residual = [](const DriftDiffusion& dd,
                           const CovarianceState& steady) {
            const Eigen::Matrix3cd c1 = steady.c.topLeftCorner<3, 3>();
            return (dd.m_hat * c1 + c1 * dd.m_hat.adjoint() + dd.n_hat)
                .cwiseAbs()
                .maxCoeff();
        };
        const double worst = std::max(residual(dd_local, steady_local),
                                      residual(dd_global, steady_global));
        add("steady_fixed_point", worst <= 1e-10,
            "largest flow residual " + fmt(worst));
    }

    // long-time limit is independent of the initial state
    if (steady_ok) {
        std::mt19937_64 rng(config.seed);
        const CovarianceState probe_a = random_probe(rng, Basis::normal);
        const CovarianceState probe_b = random_probe(rng, Basis::normal);
        const CovarianceState limit_a = steady_state(dd_global, probe_a);
        const CovarianceState limit_b = steady_state(dd_global, probe_b);
        double err = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (!damped_gap && i == 0 && j == 0) continue;
                err = std::max(err,
                               std::abs(limit_a.c(i, j) - limit_b.c(i, j)));
                if (damped_gap)
                    err = std::max(
                        err, std::abs(limit_a.c(i, j) - steady_global.c(i, j)));
            }
        add("steady_uniqueness", err <= 1e-8,
            "largest spread " + fmt(err) +
                (damped_gap ? "" : " (damped channels only)"));
    }

    // continuity right-hand sides vanish at the respective steady states
    if (steady_ok) {
        double worst = std::abs(
            energy_rhs_exact_or_local(steady_local, params));
        const EnergySinkSource at_global =
            energy_rhs_global(steady_global, params, quad);
        worst = std::max(worst, std::abs(at_global.rhs));
        const double balance = std::abs(at_global.q_left + at_global.q_right);
        const CovarianceState steady_site =
            to_site_basis(steady_global, modes);
        const double current = std::abs(excitation_current(steady_site, 1, 2));
        if (damped_gap) {
            const TcgSet& rep = tcg_sets[1];  // delta_t = 1
            const CovarianceState steady_tcg =
                steady_state(build_drift_diffusion(rep.coeffs));
            worst = std::max(
                worst,
                std::abs(EnergyRhsEvaluator(rep.split).evaluate(steady_tcg).rhs));
        }
        add("energy_stationarity",
            worst <= 1e-8 && balance <= 1e-8 && current <= 1e-10,
            "largest |rhs| " + fmt(worst) + ", secular |q_L + q_R| " +
                fmt(balance) + ", secular steady |J12| " + fmt(current));
    }

    // central-difference continuity residuals on a fine trajectory
    {
        const double h = 1e-3;
        const std::vector<double> fine{1.0 - 2.0 * h, 1.0 - h, 1.0, 1.0 + h,
                                       1.0 + 2.0 * h};
        const CovarianceState state0 = initial_state(config);
        auto short_traj = [&](const DriftDiffusion& dd) {
            const CovarianceState start =
                dd.basis == state0.basis ? state0
                                         : to_normal_basis(state0, modes);
            std::vector<CovarianceState> traj =
                evolve(start, dd, fine.back(), config.integrator_tol, fine);
            traj.erase(traj.begin());  // drop t = 0, keep the uniform window
            return traj;
        };
        const std::vector<CovarianceState> traj_local = short_traj(dd_local);
        const std::vector<CovarianceState> traj_global = short_traj(dd_global);
        double worst = energy_continuity_residual(traj_local, Approach::local,
                                                  params, quad);
        worst = std::max(worst,
                         energy_continuity_residual(traj_global,
                                                    Approach::global, params,
                                                    quad));
        const std::vector<double> grid =
            default_spatial_grid(traj_local[2], params.omega0);
        const double prob = probability_continuity_residual(traj_local, local,
                                                            grid, params);
        add("continuity_residuals", worst <= 1e-6 && prob <= 1e-4,
            "energy residual " + fmt(worst) + ", probability residual " +
                fmt(prob));
    }

    // large-window coarse-grained generator approaches the secular one
    {
        const TcgSet& wide = tcg_sets.back();  // delta_t = 1e4
        const int lo = damped_gap ? 0 : 1;
        double num = 0.0;
        double den = 0.0;
        for (int i = lo; i < 3; ++i)
            for (int j = lo; j < 3; ++j) {
                num += std::norm(wide.coeffs.gamma_plus(i, j) -
                                 global.gamma_plus(i, j)) +
                       std::norm(wide.coeffs.gamma_minus(i, j) -
                                 global.gamma_minus(i, j));
                den += std::norm(global.gamma_plus(i, j)) +
                       std::norm(global.gamma_minus(i, j));
            }
        const double gamma_rel = std::sqrt(num / den);
        bool ok = gamma_rel <= 1e-2;
        std::string detail = "rate relative distance " + fmt(gamma_rel);
        if (steady_ok && damped_gap) {
            const CovarianceState steady_wide =
                steady_state(build_drift_diffusion(wide.coeffs));
            const double q_wide =
                EnergyRhsEvaluator(wide.split).evaluate(steady_wide).q_left;
            const double q_global =
                energy_rhs_global(steady_global, params, quad).q_left;
            const double q_rel =
                std::abs(q_wide - q_global) / std::abs(q_global);
            ok = ok && q_rel <= 1e-2;
            detail += ", sink relative distance " + fmt(q_rel);
        }
        add("limit_convergence", ok, detail);
    }

    bool all_passed = true;
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckResult& result : results) {
        all_passed = all_passed && result.passed;
        checks.push_back({{"name", result.name},
                          {"passed", result.passed},
                          {"detail", result.detail}});
    }
    nlohmann::json report;
    report["checks"] = std::move(checks);
    report["all_passed"] = all_passed;
    const std::string text = report.dump(2) + "\n";
    write_text_file(out_path(config, "check_report.json"), text);
    std::cout << text;
    return all_passed ? 0 : 4;
}

int run_cli(const std::string& command, const CliOptions& options) {
    ScenarioConfig config;
    try {
        config = load_config(options.config_path);
        if (!options.out_dir.empty()) config.out_dir = options.out_dir;
        if (options.seed_set) config.seed = options.seed;
        config.validate();
    } catch (const std::exception& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    }
    try {
        std::filesystem::create_directories(config.out_dir);
        if (command == "coeffs") return cmd_coeffs(config);
        if (command == "evolve") return cmd_evolve(config);
        if (command == "sweep-dt")
            return cmd_sweep_dt(config, options.threads);
        if (command == "check")
            return cmd_check(config, options.debug_corrupt_gamma);
        std::cerr << "config error: unknown command \"" << command << "\"\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
}

}  // namespace oqs
