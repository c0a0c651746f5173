#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbtumor/errors.hpp"
#include "fbtumor/io.hpp"
#include "fbtumor/perturbation.hpp"
#include "fbtumor/radial_sim.hpp"
#include "fbtumor/run_config.hpp"
#include "fbtumor/stationary.hpp"

namespace fs = std::filesystem;
using namespace fbtumor;
using config::RunConfig;

namespace {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("FBTUMOR_LOG");
        if (!env) return LogLevel::warn;
        const std::string v = env;
        if (v == "error") return LogLevel::error;
        if (v == "warn") return LogLevel::warn;
        if (v == "info") return LogLevel::info;
        if (v == "debug") return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[info] " << msg << "\n";
}

// Index-parallel map with deterministic result ordering.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors{std::size_t(jobs)};
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                errors[std::size_t(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string tau_tag(double tau) {
    std::string s = io::format_double(tau);
    for (char& c : s)
        if (c == '.' || c == '-' || c == '+') c = '_';
    return s;
}

stationary::FixedPointOptions fixed_point_options(const RunConfig& cfg) {
    stationary::FixedPointOptions opts;
    opts.grid_size = cfg.stationary_grid_size;
    opts.max_iter = cfg.stationary_max_iter;
    opts.tol = cfg.stationary_tol;
    opts.characteristic_substeps = cfg.stationary_substeps;
    return opts;
}

int cmd_stationary(const RunConfig& cfg) {
    const std::vector<double> taus =
        cfg.sweep_tau.empty() ? std::vector<double>{cfg.params.tau} : cfg.sweep_tau;

    const auto zeroth = stationary::build_zeroth(cfg.params, cfg.series);
    const auto tauexp = stationary::compute_tau_expansion(cfg.params, zeroth);

    std::vector<stationary::FixedPointSolution> sols(taus.size());
    parallel_for(taus.size(), cfg.jobs, [&](std::size_t i) {
        ModelParams p = cfg.params;
        p.tau = taus[i];
        log_info("stationary solve at tau = " + io::format_double(taus[i]));
        sols[i] = stationary::fixed_point_solve(p, fixed_point_options(cfg), cfg.series);
    });

    if (cfg.output_format == "csv") {
        io::CsvWriter table({"tau", "R0", "R1", "R_star", "gap", "contraction_estimate"});
        for (std::size_t i = 0; i < taus.size(); ++i)
            table.add_row(std::vector<double>{taus[i], zeroth.R0(), tauexp.R1(), sols[i].R_star,
                                              sols[i].R_star - zeroth.R0() -
                                                  taus[i] * tauexp.R1(),
                                              sols[i].contraction_estimate});
        table.write((fs::path(cfg.output_dir) / "stationary.csv").string());

        io::CsvWriter rich({"tau_coarse", "tau_fine", "gap_ratio"});
        for (std::size_t i = 0; i < taus.size(); ++i)
            for (std::size_t j = 0; j < taus.size(); ++j)
                if (taus[j] > 0.0 && std::fabs(taus[i] - 2.0 * taus[j]) < 1e-15) {
                    const double gi = sols[i].R_star - zeroth.R0() - taus[i] * tauexp.R1();
                    const double gj = sols[j].R_star - zeroth.R0() - taus[j] * tauexp.R1();
                    rich.add_row(std::vector<double>{taus[i], taus[j], gi / gj});
                }
        rich.write((fs::path(cfg.output_dir) / "richardson.csv").string());

        for (std::size_t i = 0; i < taus.size(); ++i)
            io::write_text(
                (fs::path(cfg.output_dir) / ("profile_tau_" + tau_tag(taus[i]) + ".csv")).string(),
                io::grid_to_csv(sols[i].p_grid, "p"));
    } else {
        nlohmann::json j;
        j["R0"] = zeroth.R0();
        j["R1"] = tauexp.R1();
        for (std::size_t i = 0; i < taus.size(); ++i) {
            nlohmann::json row;
            row["tau"] = taus[i];
            row["R_star"] = sols[i].R_star;
            row["gap"] = sols[i].R_star - zeroth.R0() - taus[i] * tauexp.R1();
            row["contraction_estimate"] = sols[i].contraction_estimate;
            row["p"] = sols[i].p_grid.values();
            j["solves"].push_back(row);
        }
        io::write_text((fs::path(cfg.output_dir) / "stationary.json").string(), j.dump(2) + "\n");
    }
    return 0;
}

int cmd_stability(const RunConfig& cfg) {
    const double R0 = stationary::solve_R0(cfg.params.sigma_tilde, 1e-13, cfg.series);
    const double mu_crit = perturbation::mu_star(R0, cfg.series);

    if (cfg.output_format == "csv") {
        io::CsvWriter thresholds({"n", "mu_n0"});
        for (int n = 0; n <= cfg.stability_n_max; ++n) {
            const double t = perturbation::mode_threshold(n, R0, cfg.series);
            thresholds.add_row({std::to_string(n), io::format_double(t)});
        }
        thresholds.write((fs::path(cfg.output_dir) / "thresholds.csv").string());

        io::CsvWriter star({"R0", "mu_star"});
        star.add_row(std::vector<double>{R0, mu_crit});
        star.write((fs::path(cfg.output_dir) / "mu_star.csv").string());
    } else {
        nlohmann::json j;
        j["R0"] = R0;
        j["mu_star"] = mu_crit;
        for (int n = 0; n <= cfg.stability_n_max; ++n) {
            const double t = perturbation::mode_threshold(n, R0, cfg.series);
            nlohmann::json row;
            row["n"] = n;
            if (std::isinf(t)) {
                row["mu_n0"] = nullptr;
                row["infinite"] = true;
            } else {
                row["mu_n0"] = t;
                row["infinite"] = false;
            }
            j["thresholds"].push_back(row);
        }
        io::write_text((fs::path(cfg.output_dir) / "stability.json").string(), j.dump(2) + "\n");
    }

    if (!cfg.sweep_mu.empty()) {
        struct Cell {
            int n;
            double mu, g, threshold;
            std::string cls;
        };
        std::vector<Cell> cells;
        for (int n = 0; n <= cfg.stability_n_max; ++n)
            for (double mu : cfg.sweep_mu) cells.push_back({n, mu, 0.0, 0.0, ""});
        parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
            ModelParams p = cfg.params;
            p.mu = cells[i].mu;
            cells[i].g = perturbation::growth_rate(cells[i].n, p, R0, cfg.series);
            cells[i].threshold = perturbation::mode_threshold(cells[i].n, R0, cfg.series);
            cells[i].cls = std::fabs(cells[i].g) < 1e-12 ? "neutral"
                           : cells[i].g < 0.0           ? "stable"
                                                        : "unstable";
        });
        io::CsvWriter grid({"n", "mu", "g_n", "mu_n0", "classification"});
        for (const Cell& c : cells)
            grid.add_row({std::to_string(c.n), io::format_double(c.mu), io::format_double(c.g),
                          io::format_double(c.threshold), c.cls});
        grid.write((fs::path(cfg.output_dir) / "classification.csv").string());
    }
    return 0;
}

int cmd_modes(const RunConfig& cfg) {
    const std::vector<int> modes = cfg.sweep_n.empty() ? std::vector<int>{0, 1, 2} : cfg.sweep_n;
    const auto zeroth = stationary::build_zeroth(cfg.params, cfg.series);
    const auto tauexp = stationary::compute_tau_expansion(cfg.params, zeroth);

    std::vector<perturbation::ModeTrajectory> trajs(modes.size());
    parallel_for(modes.size(), cfg.jobs, [&](std::size_t i) {
        perturbation::ModeState mode{modes[i], cfg.modes_rho0_init, cfg.modes_rho1_init};
        perturbation::TrajectoryOptions opts;
        opts.dt = cfg.modes_dt;
        trajs[i] = perturbation::rho1_trajectory(modes[i], mode, cfg.params, zeroth, tauexp,
                                                 cfg.modes_t_end, opts);
    });

    for (std::size_t i = 0; i < modes.size(); ++i) {
        io::CsvWriter csv({"t", "rho0", "rho1", "combined"});
        for (std::size_t k = 0; k < trajs[i].times.size(); ++k)
            csv.add_row(std::vector<double>{
                trajs[i].times[k], trajs[i].rho0[k], trajs[i].rho1[k],
                trajs[i].rho0[k] + cfg.params.tau * trajs[i].rho1[k]});
        csv.write((fs::path(cfg.output_dir) / ("mode_" + std::to_string(modes[i]) + ".csv"))
                      .string());
    }
    return 0;
}

int cmd_evolve(const RunConfig& cfg) {
    sim::SimConfig scfg;
    scfg.dt = cfg.evolve_dt;
    scfg.t_end = cfg.evolve_t_end;
    scfg.variant =
        cfg.evolve_variant == "full" ? sim::Variant::full_delay : sim::Variant::dropped_otau;
    scfg.profile_nodes = cfg.evolve_profile_nodes;
    scfg.characteristic_substeps = cfg.evolve_substeps;

    double R_init = cfg.evolve_r_init;
    if (R_init <= 0.0)
        R_init = 1.2 * stationary::solve_R0(cfg.params.sigma_tilde, 1e-13, cfg.series);

    const sim::DelayTrajectory traj = sim::run_to_steady(R_init, cfg.params, scfg, cfg.series);

    io::CsvWriter csv({"t", "R", "dR_dt"});
    for (std::size_t i = 0; i < traj.times().size(); ++i)
        csv.add_row(std::vector<double>{traj.times()[i], traj.radii()[i], traj.rates()[i]});
    csv.write((fs::path(cfg.output_dir) / "trajectory.csv").string());
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    struct Row {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Row> rows;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        rows.push_back({name, pass, detail});
    };

    std::vector<double> grid = cfg.verify_x_grid;
    if (grid.empty())
        for (int k = 1; k <= 200; ++k) grid.push_back(10.0 * k / 200.0);

    const bessel::IdentityReport rep = bessel::verify_identities(grid, cfg.verify_n_max,
                                                                 cfg.series);
    io::write_text((fs::path(cfg.output_dir) / "identity_report.json").string(),
                   io::identity_report_to_json(rep));
    add("bessel.recurrences", rep.three_term_residual < 1e-12 &&
                                  rep.recurrence_down_residual < 1e-12 &&
                                  rep.recurrence_up_residual < 1e-12,
        "max residual " + io::format_double(std::max({rep.three_term_residual,
                                                      rep.recurrence_down_residual,
                                                      rep.recurrence_up_residual})));
    add("bessel.weighted_derivative", rep.weighted_derivative_residual < 1e-10,
        "residual " + io::format_double(rep.weighted_derivative_residual));
    add("bessel.product_series", rep.product_series_residual < 1e-12,
        "residual " + io::format_double(rep.product_series_residual));
    add("bessel.inequalities", rep.turan_inequality_holds && rep.lower_product_bound_holds,
        rep.turan_inequality_holds ? "strict on grid" : "violated");
    add("bessel.monotone", rep.monotone_in_x, "");

    const auto zeroth = stationary::build_zeroth(cfg.params, cfg.series);
    const auto tauexp = stationary::compute_tau_expansion(cfg.params, zeroth);
    const double A = cfg.verify_flip_a_sign ? -tauexp.A_value() : tauexp.A_value();
    add("tau.A_negative", A < 0.0, "A = " + io::format_double(A));
    add("tau.B_negative", tauexp.B_value() < 0.0, "B = " + io::format_double(tauexp.B_value()));
    add("tau.R1_positive", cfg.params.mu == 0.0 || tauexp.R1() > 0.0,
        "R1 = " + io::format_double(tauexp.R1()));
    add("tau.integral_identity", std::fabs(stationary::residual_integral(zeroth, tauexp)) < 1e-8,
        io::format_double(stationary::residual_integral(zeroth, tauexp)));

    double g1_max = 0.0;
    for (int k = 1; k <= 20; ++k) {
        ModelParams p = cfg.params;
        p.mu = 0.25 * k;
        g1_max = std::max(g1_max,
                          std::fabs(perturbation::growth_rate(1, p, zeroth.R0(), cfg.series)));
    }
    add("modes.g1_zero", g1_max < 1e-13, "max |g1| = " + io::format_double(g1_max));
    add("modes.g0_negative",
        perturbation::growth_rate(0, cfg.params, zeroth.R0(), cfg.series) < 0.0, "");

    double prev = 0.0;
    bool increasing = true;
    for (int n = 2; n <= cfg.stability_n_max; ++n) {
        const double t = perturbation::mode_threshold(n, zeroth.R0(), cfg.series);
        if (t <= prev) increasing = false;
        prev = t;
    }
    add("modes.thresholds_increasing", increasing, "");

    const auto ode1 =
        perturbation::first_order_mode_ode(1, cfg.params, zeroth, tauexp, cfg.bvp_grid_size);
    const double drift =
        std::fabs(ode1.rhs(0.7, 1.3));  // arbitrary amplitudes; must cancel
    add("modes.rho1_mode1_drift", drift < 1e-9, "|d rho_1^1/dt| = " + io::format_double(drift));

    std::size_t width = 0;
    for (const Row& r : rows) width = std::max(width, r.name.size());
    bool all_pass = true;
    for (const Row& r : rows) {
        all_pass = all_pass && r.pass;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
                  << std::string(width - r.name.size() + 2, ' ') << r.detail << "\n";
    }
    std::cout << (all_pass ? "verification passed" : "verification FAILED") << "\n";
    return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delayed free-boundary tumor model: stationary solutions, linear stability, "
                 "mode dynamics, and a delayed radial simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir, format;
    int jobs = 0;
    app.add_option("--config", config_path, "run configuration file (key = value lines)");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--format", format, "csv or json (overrides output.format)");
    app.add_option("--jobs", jobs, "worker threads for sweeps (overrides jobs)");

    CLI::App* sub_stationary =
        app.add_subcommand("stationary", "radii R0, R1, and the delayed fixed point R*(tau)");
    CLI::App* sub_stability =
        app.add_subcommand("stability", "per-mode thresholds mu_n^0 and mu*");
    CLI::App* sub_modes = app.add_subcommand("modes", "mode amplitude trajectories");
    CLI::App* sub_evolve = app.add_subcommand("evolve", "delayed radial evolution to steady state");
    CLI::App* sub_verify = app.add_subcommand("verify", "identity and sign self-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg =
            config_path.empty() ? RunConfig{} : config::parse_config_file(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!format.empty()) cfg.output_format = format;
        if (jobs > 0) cfg.jobs = jobs;
        cfg.validate();
        fs::create_directories(cfg.output_dir);

        if (sub_stationary->parsed()) return cmd_stationary(cfg);
        if (sub_stability->parsed()) return cmd_stability(cfg);
        if (sub_modes->parsed()) return cmd_modes(cfg);
        if (sub_evolve->parsed()) return cmd_evolve(cfg);
        if (sub_verify->parsed()) return cmd_verify(cfg);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
