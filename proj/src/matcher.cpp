#include "epshock/matcher.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace epshock {

namespace {

constexpr double grid_margin_rel = 1e-8;  // keeps the last grid point off t_s = T

void run_parallel(std::size_t n_items, unsigned max_threads,
                  const std::function<void(std::size_t)>& work) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned n_threads = max_threads == 0 ? hw : std::min(max_threads, hw);
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_items));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < n_items; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < n_items; i = next.fetch_add(1)) work(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

ShockSolution forward_solve(const ProblemConfig& config, double t_s, bool with_sensitivity) {
    config.validate();
    const GasLaw gas = config.gas();
    const Geometry geom = config.geometry();
    const double span = geom.span();
    if (!(t_s >= 0.0 && t_s < span))
        throw ConfigError("forward_solve: t_s must lie in [0, T)");

    ShockSolution sol;
    sol.t_s = t_s;
    sol.upstream = solve_upstream(config.entrance(), gas, geom, config.b, t_s, config.tol);
    if (sol.upstream.status != SolveStatus::completed)
        throw SolveError(SolveError::Kind::upstream_sonic,
                         "forward_solve: upstream flow reached the sonic band before t_s",
                         sol.upstream.stop_guard.empty() ? "sonic" : sol.upstream.stop_guard,
                         sol.upstream.t_stop);

    sol.jump = apply_jump(sol.upstream.last().state, t_s, gas, geom);
    sol.downstream = solve_downstream(sol.jump.downstream, sol.jump.kappa_s, t_s, gas, geom,
                                      config.b, span, config.tol);
    if (sol.downstream.status != SolveStatus::completed)
        throw SolveError(SolveError::Kind::downstream_stopped,
                         "forward_solve: downstream flow stopped before the exit",
                         sol.downstream.stop_guard.empty() ? "step-failure"
                                                           : sol.downstream.stop_guard,
                         sol.downstream.t_stop);

    sol.certificates =
        compute_certificates(sol.upstream, gas, geom, config.b, sol.jump, &sol.downstream);
    sol.exit_pressure = sol.downstream.last().state.p;

    if (with_sensitivity) {
        const SensitivityIc ic = jump_sensitivity_ic(sol.upstream, sol.jump, gas, geom);
        sol.sensitivity = integrate_sensitivity(sol.downstream, ic, gas, geom, config.tol);
    }
    return sol;
}

ExitPressureMap exit_pressure_map(const ProblemConfig& config, int n_grid,
                                  unsigned max_threads) {
    config.validate();
    if (n_grid < 2) throw ConfigError("exit_pressure_map: n_grid must be at least 2");
    const double span = config.geometry().span();
    const double ts_max = span * (1.0 - grid_margin_rel);

    ExitPressureMap map;
    map.grid.resize(static_cast<std::size_t>(n_grid));
    run_parallel(map.grid.size(), max_threads, [&](std::size_t i) {
        MapPoint& pt = map.grid[i];
        pt.t_s = ts_max * static_cast<double>(i) / (n_grid - 1);
        try {
            ShockSolution sol = forward_solve(config, pt.t_s);
            pt.p_exit = sol.exit_pressure;
            pt.certificates = sol.certificates;
            pt.ok = true;
        } catch (const std::exception& e) {
            // Grid points run on worker threads; any failure is recorded
            // per point rather than escaping the pool.
            pt.error = e.what();
        }
    });

    map.complete = true;
    map.certified = true;
    map.monotone_decreasing = true;
    map.max_inversion_rel = -std::numeric_limits<double>::infinity();
    bool any = false;
    const MapPoint* prev = nullptr;
    for (const auto& pt : map.grid) {
        if (!pt.ok) {
            map.complete = false;
            map.certified = false;
            continue;
        }
        if (!pt.certificates.certified()) map.certified = false;
        if (!any) {
            map.p_min = map.p_max = pt.p_exit;
            any = true;
        } else {
            map.p_min = std::min(map.p_min, pt.p_exit);
            map.p_max = std::max(map.p_max, pt.p_exit);
        }
        if (prev) {
            if (!(pt.p_exit < prev->p_exit)) map.monotone_decreasing = false;
            map.max_inversion_rel =
                std::max(map.max_inversion_rel, (pt.p_exit - prev->p_exit) / prev->p_exit);
        }
        prev = &pt;
    }
    if (!any) {
        map.monotone_decreasing = false;
        map.certified = false;
        map.p_min = map.p_max = std::numeric_limits<double>::quiet_NaN();
    }
    return map;
}

ShockSolution match_exit_pressure(const ProblemConfig& config, const ExitPressureMap& map,
                                  double p_ex, double tol_ts, bool force) {
    config.validate();
    if (!(p_ex > 0.0)) throw ConfigError("match_exit_pressure: p_ex must be positive");
    if (!(tol_ts > 0.0 && tol_ts < 1.0))
        throw ConfigError("match_exit_pressure: tol_ts must lie in (0, 1)");

    const MapPoint* first_ok = nullptr;
    const MapPoint* last_ok = nullptr;
    for (const auto& pt : map.grid) {
        if (!pt.ok) continue;
        if (!first_ok) first_ok = &pt;
        last_ok = &pt;
    }
    if (!first_ok)
        throw SolveError(SolveError::Kind::downstream_stopped,
                         "match_exit_pressure: no grid point produced a complete solution",
                         map.grid.empty() ? "" : map.grid.front().error, 0.0);

    if (!(p_ex >= map.p_min && p_ex <= map.p_max))
        throw OutOfRangeError("match_exit_pressure: p_ex outside the exit-pressure range",
                              p_ex, map.p_min, map.p_max);

    if (!map.certified && !(map.complete && map.monotone_decreasing) && !force)
        throw NonMonotoneMapError(
            "match_exit_pressure: map is neither certified nor empirically monotone; "
            "pass force to bisect anyway");

    // Monotone decreasing map: p(lo) >= p_ex >= p(hi).
    const double span = config.geometry().span();
    double lo = first_ok->t_s;
    double hi = last_ok->t_s;
    while (hi - lo > tol_ts * span) {
        const double mid = 0.5 * (lo + hi);
        const ShockSolution trial = forward_solve(config, mid);
        if (trial.exit_pressure > p_ex)
            lo = mid;
        else
            hi = mid;
    }
    return forward_solve(config, 0.5 * (lo + hi));
}

ShockSolution match_exit_pressure(const ProblemConfig& config, double p_ex, double tol_ts,
                                  bool force) {
    return match_exit_pressure(config, exit_pressure_map(config, config.n_grid), p_ex, tol_ts,
                               force);
}

double bernoulli_exit_form(double p, double kappa, double m0, double hat_exit,
                           const GasLaw& gas) {
    const double g = gas.gamma;
    return 0.5 * std::pow(m0 / hat_exit, 2.0) * std::pow(kappa / p, 2.0 / g) +
           g / (g - 1.0) * std::pow(p, 1.0 - 1.0 / g) * std::pow(kappa, 1.0 / g);
}

IdentityReport bernoulli_exit_identities(const ShockSolution& sol, const GasLaw& gas,
                                         const Geometry& geom) {
    IdentityReport rep;
    const auto& exit = sol.downstream.last();
    const double b_exit = bernoulli(exit.state, gas);
    const double g_form = bernoulli_exit_form(exit.state.p, sol.jump.kappa_s,
                                              sol.downstream.inv.m0, geom.radius(exit.t), gas);
    rep.bernoulli_form_residual = std::abs(g_form - b_exit) / std::abs(b_exit);

    const double b_shock_down = bernoulli(sol.downstream.first().state, gas);
    const double int_down =
        field_integral(sol.downstream, sol.downstream.t_from, sol.downstream.t_stop, geom);
    rep.field_integral_residual_down =
        std::abs(b_exit - b_shock_down - int_down) / std::abs(b_exit);

    const double b_entrance = bernoulli(sol.upstream.first().state, gas);
    const double b_shock_up = bernoulli(sol.upstream.last().state, gas);
    const double int_up =
        field_integral(sol.upstream, sol.upstream.t_from, sol.upstream.t_stop, geom);
    rep.field_integral_residual_up =
        std::abs(b_shock_up - b_entrance - int_up) / std::abs(b_shock_up);

    rep.g_p = (1.0 - exit.mach2) / exit.state.rho;
    rep.exit_subsonic = rep.g_p > 0.0;
    return rep;
}

}  // namespace epshock
