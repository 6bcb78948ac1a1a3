#include "epshock/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "epshock/io.hpp"

namespace epshock::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string out_path(const Options& opts, const char* name) {
    return opts.out_dir + "/" + name;
}

Json base_report(const char* command, const ProblemConfig& config) {
    Json j;
    j["command"] = command;
    j["config"] = echo_config(config);
    Json notes = Json::array();
    if (!config.b.is_constant())
        notes.push_back("b.table is evaluated with linear interpolation; "
                        "supply a fine table if C1 smoothness matters");
    j["notes"] = notes;
    return j;
}

void emit_report(Json& j, const Options& opts, const std::string& outcome,
                 Clock::time_point start) {
    j["outcome"] = outcome;
    j["wall_time_seconds"] = seconds_since(start);
    write_text_file(out_path(opts, "report.json"), j.dump(2) + "\n");
}

Json solve_error_json(const SolveError& e) {
    Json j;
    j["message"] = e.what();
    j["guard"] = e.guard;
    j["t_fail"] = e.t_fail;
    return j;
}

int fail_config(const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_bad_config;
}

void write_solution_files(const ShockSolution& sol, const ProblemConfig& config,
                          const Options& opts) {
    const GasLaw gas = config.gas();
    const Geometry geom = config.geometry();
    write_text_file(out_path(opts, "upstream.csv"), profile_csv(sol.upstream, gas, geom));
    write_text_file(out_path(opts, "downstream.csv"), profile_csv(sol.downstream, gas, geom));
}

Json solution_json(const ShockSolution& sol, const ProblemConfig& config) {
    Json j;
    j["t_s"] = sol.t_s;
    j["exit_pressure"] = sol.exit_pressure;
    j["kappa_s"] = sol.jump.kappa_s;
    j["mach2_minus"] = sol.jump.mach2_minus;
    j["mach2_plus"] = sol.jump.mach2_plus;
    j["certificates"] = certificates_json(sol.certificates);
    j["identities"] =
        identities_json(bernoulli_exit_identities(sol, config.gas(), config.geometry()));
    return j;
}

}  // namespace

unsigned threads_from_env() {
    const char* raw = std::getenv("EPSHOCK_THREADS");
    if (!raw || !*raw) return 0;
    char* end = nullptr;
    const unsigned long v = std::strtoul(raw, &end, 10);
    if (end == raw || *end != '\0') return 0;
    return static_cast<unsigned>(v);
}

int cmd_forward(const Options& opts, double t_s) {
    const auto start = Clock::now();
    ProblemConfig config;
    try {
        config = load_config(opts.config_path);
        if (!(t_s >= 0.0 && t_s < config.geometry().span()))
            throw ConfigError("forward: --ts must lie in [0, T)");
    } catch (const ConfigError& e) {
        return fail_config(e);
    }

    Json report = base_report("forward", config);
    report["t_s"] = t_s;
    try {
        const ShockSolution sol = forward_solve(config, t_s);
        write_solution_files(sol, config, opts);
        report["solution"] = solution_json(sol, config);
        emit_report(report, opts, "ok", start);
        return exit_ok;
    } catch (const SolveError& e) {
        report["error"] = solve_error_json(e);
        emit_report(report, opts, "guard", start);
        std::cerr << "error: " << e.what() << " (guard " << e.guard << " at t = " << e.t_fail
                  << ")\n";
        return exit_guard;
    } catch (const SonicDegeneracyError& e) {
        report["error"] = Json{{"message", e.what()}};
        emit_report(report, opts, "guard", start);
        std::cerr << "error: " << e.what() << "\n";
        return exit_guard;
    }
}

int cmd_solve(const Options& opts) {
    const auto start = Clock::now();
    ProblemConfig config;
    try {
        config = load_config(opts.config_path);
        if (!config.p_ex) throw ConfigError("solve: config must set p_ex");
    } catch (const ConfigError& e) {
        return fail_config(e);
    }

    Json report = base_report("solve", config);
    report["p_ex"] = *config.p_ex;
    try {
        const ExitPressureMap map =
            exit_pressure_map(config, config.n_grid, threads_from_env());
        report["map"] = map_summary_json(map);
        if (opts.force && !map.certified)
            report["warnings"] =
                Json::array({"bisection forced on an uncertified exit-pressure map"});
        const ShockSolution sol =
            match_exit_pressure(config, map, *config.p_ex, config.tol.tol_ts, opts.force);
        write_solution_files(sol, config, opts);
        report["solution"] = solution_json(sol, config);
        report["pressure_residual_rel"] =
            std::abs(sol.exit_pressure - *config.p_ex) / *config.p_ex;
        emit_report(report, opts, "ok", start);
        return exit_ok;
    } catch (const OutOfRangeError& e) {
        report["error"] = Json{{"message", e.what()},
                               {"p_ex", e.p_ex},
                               {"range", Json::array({e.p_min, e.p_max})}};
        emit_report(report, opts, "out-of-range", start);
        std::cerr << "error: " << e.what() << "\n";
        return exit_out_of_range;
    } catch (const NonMonotoneMapError& e) {
        report["error"] = Json{{"message", e.what()}};
        emit_report(report, opts, "unsound", start);
        std::cerr << "error: " << e.what() << "\n";
        return exit_unsound;
    } catch (const SolveError& e) {
        report["error"] = solve_error_json(e);
        emit_report(report, opts, "guard", start);
        std::cerr << "error: " << e.what() << "\n";
        return exit_guard;
    } catch (const SonicDegeneracyError& e) {
        report["error"] = Json{{"message", e.what()}};
        emit_report(report, opts, "guard", start);
        std::cerr << "error: " << e.what() << "\n";
        return exit_guard;
    }
}

int cmd_sweep(const Options& opts, int n_grid) {
    const auto start = Clock::now();
    ProblemConfig config;
    try {
        config = load_config(opts.config_path);
        if (n_grid < 2) throw ConfigError("sweep: --grid must be at least 2");
    } catch (const ConfigError& e) {
        return fail_config(e);
    }

    Json report = base_report("sweep", config);
    report["n_grid"] = n_grid;
    const ExitPressureMap map = exit_pressure_map(config, n_grid, threads_from_env());
    write_text_file(out_path(opts, "sweep.csv"), sweep_csv(map));
    report["map"] = map_summary_json(map);

    bool any_ok = false;
    for (const auto& pt : map.grid) any_ok = any_ok || pt.ok;
    emit_report(report, opts, any_ok ? "ok" : "guard", start);
    if (!any_ok) {
        std::cerr << "error: every grid point failed to solve\n";
        return exit_guard;
    }
    return exit_ok;
}

int cmd_diagnose(const Options& opts) {
    const auto start = Clock::now();
    ProblemConfig config;
    try {
        config = load_config(opts.config_path);
    } catch (const ConfigError& e) {
        return fail_config(e);
    }

    const GasLaw gas = config.gas();
    const Geometry geom = config.geometry();
    const double span = geom.span();
    const double ts_max = span * (1.0 - 1e-8);

    Json report = base_report("diagnose", config);
    const double g = gas.gamma;
    report["delta0"] = 1.0 - 2.0 * (g - 1.0) / (g + 1.0) * std::log(geom.r0 / geom.r1);
    report["b0"] = config.b.bound();
    report["beta1"] = config.b.bound() * (geom.r0 * geom.r0 - geom.r1 * geom.r1) / 2.0;

    if (g >= 2.0) {
        const auto ineq = check_contraction_inequality(g, config.pineq_samples);
        report["contraction_inequality"] = Json{{"applicable", true},
                                                {"holds", ineq.holds},
                                                {"worst_value", ineq.worst_value},
                                                {"worst_xi", ineq.worst_xi},
                                                {"peak_value", ineq.peak_value}};
    } else {
        report["contraction_inequality"] = Json{{"applicable", false}};
    }

    // Upstream survey over the full span.
    SolutionProfile up_full;
    try {
        up_full = solve_upstream(config.entrance(), gas, geom, config.b, span, config.tol);
        Json upj;
        upj["completed"] = up_full.status == SolveStatus::completed;
        if (up_full.status != SolveStatus::completed) {
            upj["stop_guard"] = up_full.stop_guard;
            upj["t_stop"] = up_full.t_stop;
        }
        double min_excess = std::numeric_limits<double>::infinity();
        bool monotone = true;
        for (std::size_t i = 0; i < up_full.samples.size(); ++i) {
            const auto& s = up_full.samples[i];
            min_excess = std::min(min_excess, geom.radius(s.t) * s.state.E -
                                                  critical_speed_squared(s.state, gas));
            if (i > 0 && !(s.mach2 > up_full.samples[i - 1].mach2)) monotone = false;
        }
        upj["min_field_excess"] = min_excess;
        upj["mach_monotone"] = monotone;
        report["upstream"] = upj;
    } catch (const Error& e) {
        report["upstream"] = Json{{"error", e.what()}};
    }

    // Per-shock-location margins and downstream outcomes.
    Json rows = Json::array();
    for (int i = 0; i < config.diag_grid; ++i) {
        const double t_s = ts_max * static_cast<double>(i) / (config.diag_grid - 1);
        Json row;
        row["t_s"] = t_s;
        try {
            const SolutionProfile up =
                solve_upstream(config.entrance(), gas, geom, config.b, t_s, config.tol);
            if (up.status != SolveStatus::completed) {
                row["error"] = "upstream stopped by guard '" + up.stop_guard + "'";
                row["t_fail"] = up.t_stop;
                rows.push_back(row);
                continue;
            }
            const JumpRecord jump = apply_jump(up.last().state, t_s, gas, geom);
            const Certificates certs = compute_certificates(up, gas, geom, config.b, jump);
            row["f_s"] = certs.f_s_value;
            row["g_s"] = certs.g_s_value;
            row["min_field_excess"] = certs.min_field_excess;
            try {
                const SolutionProfile down = solve_downstream(
                    jump.downstream, jump.kappa_s, t_s, gas, geom, config.b, span, config.tol);
                row["downstream_completed"] = down.status == SolveStatus::completed;
                if (down.status == SolveStatus::completed) {
                    row["p_exit"] = down.last().state.p;
                    row["density_monotone"] = down.density_monotone;
                } else {
                    row["stop_guard"] = down.stop_guard;
                    row["t_stop"] = down.t_stop;  // achieved downstream span
                }
            } catch (const Error& e) {
                row["downstream_completed"] = false;
                row["error"] = e.what();
            }
        } catch (const Error& e) {
            row["error"] = e.what();
        }
        rows.push_back(row);
    }
    report["shock_locations"] = rows;

    // Variational sensitivities against central finite differences at an
    // interior shock location.
    const double t_mid = 0.5 * ts_max;
    const double h = config.tol.fd_step * span;
    Json sj;
    sj["t_s"] = t_mid;
    try {
        const ShockSolution sol = forward_solve(config, t_mid, true);
        const PressureSensitivity ps =
            pressure_sensitivity(sol.downstream, *sol.sensitivity, gas, geom);
        const ShockSolution plus = forward_solve(config, t_mid + h);
        const ShockSolution minus = forward_solve(config, t_mid - h);
        const double x_fd =
            (plus.downstream.last().state.rho - minus.downstream.last().state.rho) / (2.0 * h);
        const double dp_fd = (plus.exit_pressure - minus.exit_pressure) / (2.0 * h);
        const double x_end = sol.sensitivity->samples.back().x;

        sj["x_exit"] = x_end;
        sj["x_exit_fd"] = x_fd;
        sj["x_rel_err"] = std::abs(x_end - x_fd) / std::abs(x_fd);
        sj["dp_dts"] = ps.dp_dts;
        sj["dp_dts_fd"] = dp_fd;
        sj["dp_rel_err"] = std::abs(ps.dp_dts - dp_fd) / std::abs(dp_fd);
        sj["db_route_residual"] = ps.route_residual;

        bool x_negative = true;
        for (const auto& s : sol.sensitivity->samples) x_negative = x_negative && s.x < 0.0;
        sj["sign_ledger"] = Json{{"dkappa_dts_positive", sol.sensitivity->dkappa_dts > 0.0},
                                 {"x0_negative", sol.sensitivity->x_initial < 0.0},
                                 {"y0_negative", sol.sensitivity->y_initial < 0.0},
                                 {"x_negative_throughout", x_negative},
                                 {"db_dts_negative", ps.db_dts < 0.0},
                                 {"g_p_positive", ps.g_p > 0.0},
                                 {"dp_dts_negative", ps.dp_dts < 0.0}};
    } catch (const Error& e) {
        sj["error"] = e.what();
    }
    report["sensitivity"] = sj;

    emit_report(report, opts, "ok", start);
    return exit_ok;
}

int run(int argc, char** argv) {
    CLI::App app{"Radial transonic shock solver for steady Euler-Poisson flow "
                 "in a convergent annular nozzle"};
    app.require_subcommand(1);

    Options opts;
    double t_s = 0.0;
    int n_grid = 21;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "path to the JSON config")->required();
        sub->add_option("--out", opts.out_dir, "output directory (default .)");
        sub->add_flag("--force", opts.force, "bisect even when the map is uncertified");
    };

    CLI::App* forward =
        app.add_subcommand("forward", "solve with a prescribed shock location");
    add_common(forward);
    forward->add_option("--ts", t_s, "shock location in the nozzle coordinate")->required();

    CLI::App* solve = app.add_subcommand("solve", "match the prescribed exit pressure");
    add_common(solve);

    CLI::App* sweep = app.add_subcommand("sweep", "tabulate exit pressure over shock locations");
    add_common(sweep);
    sweep->add_option("--grid", n_grid, "number of shock locations")->required();

    CLI::App* diagnose = app.add_subcommand("diagnose", "report certificates and sensitivities");
    add_common(diagnose);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (forward->parsed()) return cmd_forward(opts, t_s);
        if (solve->parsed()) return cmd_solve(opts);
        if (sweep->parsed()) return cmd_sweep(opts, n_grid);
        return cmd_diagnose(opts);
    } catch (const ConfigError& e) {
        return fail_config(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_guard;
    }
}

}  // namespace epshock::cli
