#include "epshock/flow.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace epshock {

FlowState SolutionProfile::state_at(double t, const GasLaw& gas, const Geometry& geom) const {
    const Closure cl = Closure::make(gas, inv);
    std::array<double, 2> y{};
    trajectory.dense_eval(t, y);
    const double hat_t = geom.radius(t);
    const double E = y[1] / hat_t;
    return branch == Branch::supersonic ? cl.state_from_mach2(hat_t, y[0], E)
                                        : cl.state_from_density(hat_t, y[0], E);
}

static SolveStatus map_status(const ivp::Trajectory& traj) {
    switch (traj.status) {
        case ivp::IntegrationStatus::completed: return SolveStatus::completed;
        case ivp::IntegrationStatus::guard_fired: return SolveStatus::guard_stopped;
        default: return SolveStatus::step_failure;
    }
}

SolutionProfile solve_upstream(const FlowState& entrance, const GasLaw& gas,
                               const Geometry& geom, const BackgroundCharge& b,
                               double t_stop, const Tolerances& tol) {
    entrance.validate();
    const double m2_0 = mach_squared(entrance, gas);
    if (!(m2_0 >= 1.0 + ProblemConfig::entrance_margin))
        throw ConfigError("solve_upstream: entrance must be supersonic, M0^2 >= 1 + 1e-6");
    if (!(t_stop >= 0.0 && t_stop <= geom.span()))
        throw FormulaDomainError("solve_upstream: t_stop must lie in [0, span]");

    const ConservedInvariants inv = entrance_invariants(entrance, gas, geom);
    const Closure cl = Closure::make(gas, inv);

    SolutionProfile prof;
    prof.branch = Branch::supersonic;
    prof.inv = inv;
    prof.t_from = 0.0;
    prof.t_to = t_stop;

    const std::vector<double> y0{m2_0, geom.r0 * entrance.E};
    if (t_stop == 0.0) {
        prof.trajectory = ivp::Trajectory::single_point(0.0, y0);
        prof.samples.push_back({0.0, entrance, m2_0});
        prof.t_stop = 0.0;
        prof.status = SolveStatus::completed;
        return prof;
    }

    ivp::IvpProblem problem;
    problem.dimension = 2;
    problem.t_start = 0.0;
    problem.t_end = t_stop;
    problem.y_start = y0;
    problem.rhs = [&cl, &geom, &b](double t, std::span<const double> y, std::span<double> dy) {
        const double hat_t = geom.radius(t);
        dy[0] = detail::mach2_rate_raw(cl, hat_t, y[0], y[1] / hat_t);
        dy[1] = detail::field_rate_from_mach2_raw(cl, t, hat_t, y[0], b);
    };
    const double guard_band = tol.sonic_guard;
    problem.guards.push_back(
        {"sonic", [guard_band](double, std::span<const double> y) {
             return y[0] - (1.0 + guard_band);
         }});

    prof.trajectory = ivp::integrate(problem, {tol.rtol, tol.atol, tol.max_steps});
    prof.status = map_status(prof.trajectory);
    if (prof.trajectory.guard) prof.stop_guard = prof.trajectory.guard->name;
    prof.t_stop = prof.trajectory.t_reached();

    prof.samples.reserve(prof.trajectory.size());
    for (std::size_t i = 0; i < prof.trajectory.size(); ++i) {
        const double t = prof.trajectory.time(i);
        const auto y = prof.trajectory.state(i);
        const double hat_t = geom.radius(t);
        prof.samples.push_back({t, cl.state_from_mach2(hat_t, y[0], y[1] / hat_t), y[0]});
    }
    return prof;
}

SolutionProfile solve_downstream(const FlowState& post_shock, double kappa_s, double t_s,
                                 const GasLaw& gas, const Geometry& geom,
                                 const BackgroundCharge& b, double t_exit,
                                 const Tolerances& tol) {
    post_shock.validate();
    if (!(kappa_s > 0.0)) throw FormulaDomainError("solve_downstream: kappa_s must be positive");
    if (!(t_s >= 0.0 && t_s < t_exit && t_exit <= geom.span()))
        throw FormulaDomainError("solve_downstream: need 0 <= t_s < t_exit <= span");
    const double m2_s = mach_squared(post_shock, gas);
    if (!(m2_s < 1.0 - tol.sonic_guard))
        throw SonicDegeneracyError("solve_downstream: post-shock state inside the sonic band");

    const double hat_s = geom.radius(t_s);
    const ConservedInvariants inv{hat_s * post_shock.rho * post_shock.u, kappa_s};
    const Closure cl = Closure::make(gas, inv);

    ivp::IvpProblem problem;
    problem.dimension = 2;
    problem.t_start = t_s;
    problem.t_end = t_exit;
    problem.y_start = {post_shock.rho, hat_s * post_shock.E};
    problem.rhs = [&cl, &geom, &b](double t, std::span<const double> y, std::span<double> dy) {
        const double hat_t = geom.radius(t);
        dy[0] = detail::density_rate_raw(cl, hat_t, y[0], y[1] / hat_t);
        dy[1] = detail::field_rate_from_density_raw(t, hat_t, y[0], b);
    };
    const double guard_band = tol.sonic_guard;
    const double rho_floor = 1e-12 * post_shock.rho;
    const double rho_cap = 1e9 * post_shock.rho;
    problem.guards.push_back(
        {"sonic", [&cl, &geom, guard_band](double t, std::span<const double> y) {
             return (1.0 - guard_band) - cl.mach2_from_density(geom.radius(t), y[0]);
         }});
    problem.guards.push_back(
        {"positivity", [rho_floor](double, std::span<const double> y) {
             return y[0] - rho_floor;
         }});
    problem.guards.push_back(
        {"density-blowup", [rho_cap](double, std::span<const double> y) {
             return rho_cap - y[0];
         }});

    SolutionProfile prof;
    prof.branch = Branch::subsonic;
    prof.inv = inv;
    prof.t_from = t_s;
    prof.t_to = t_exit;
    prof.trajectory = ivp::integrate(problem, {tol.rtol, tol.atol, tol.max_steps});
    prof.status = map_status(prof.trajectory);
    if (prof.trajectory.guard) prof.stop_guard = prof.trajectory.guard->name;
    prof.t_stop = prof.trajectory.t_reached();

    prof.samples.reserve(prof.trajectory.size());
    double prev_rho = post_shock.rho;
    for (std::size_t i = 0; i < prof.trajectory.size(); ++i) {
        const double t = prof.trajectory.time(i);
        const auto y = prof.trajectory.state(i);
        const double hat_t = geom.radius(t);
        prof.samples.push_back({t, cl.state_from_density(hat_t, y[0], y[1] / hat_t),
                                cl.mach2_from_density(hat_t, y[0])});
        if (y[0] < prev_rho) prof.density_monotone = false;
        prev_rho = y[0];
    }
    return prof;
}

Certificates compute_certificates(const SolutionProfile& up, const GasLaw& gas,
                                  const Geometry& geom, const BackgroundCharge& b,
                                  const JumpRecord& jump, const SolutionProfile* down) {
    const double g = gas.gamma;
    Certificates c;
    c.delta0 = 1.0 - 2.0 * (g - 1.0) / (g + 1.0) * std::log(geom.r0 / geom.r1);
    c.b0 = b.bound();
    c.beta1 = c.b0 * (geom.r0 * geom.r0 - geom.r1 * geom.r1) / 2.0;

    double min_excess = std::numeric_limits<double>::infinity();
    double worst_drop = 0.0;
    for (std::size_t i = 0; i < up.samples.size(); ++i) {
        const auto& s = up.samples[i];
        const double excess = geom.radius(s.t) * s.state.E - critical_speed_squared(s.state, gas);
        min_excess = std::min(min_excess, excess);
        if (i > 0) {
            const double drop = up.samples[i - 1].mach2 - s.mach2;
            if (drop >= 0.0) {
                c.mach_monotone = false;
                worst_drop = std::max(worst_drop, drop);
            }
        }
    }
    c.min_field_excess = min_excess;
    c.mach_violation = worst_drop;

    const double hat_s = geom.radius(jump.t_s);
    const double u_s = jump.downstream.u;
    c.f_s_value = hat_s * jump.downstream.E - hat_s * hat_s / (geom.r1 * geom.r1) * u_s * u_s -
                  c.beta1;

    const double q_s = geom.r0 / hat_s;
    const double contraction = std::exp((g + 1.0) / (2.0 * (g - 1.0))) / q_s;
    const double slow_down = (g - 1.0) / (g + 1.0) + 2.0 / ((g + 1.0) * jump.mach2_minus);
    c.g_s_value = hat_s * jump.upstream.E -
                  contraction * contraction * slow_down * slow_down * (g + 1.0) / (g - 1.0) *
                      jump.k_minus -
                  c.beta1;

    if (down) {
        c.density_monotone = down->density_monotone;
        c.downstream_checked = true;
    }
    return c;
}

ContractionInequalityResult check_contraction_inequality(double gamma, int samples) {
    if (!(gamma >= 2.0))
        throw FormulaDomainError("check_contraction_inequality requires gamma >= 2");
    if (samples < 100)
        throw FormulaDomainError("check_contraction_inequality requires samples >= 100");

    const double a = (gamma + 1.0) / (2.0 * (gamma - 1.0));
    const double xi_sup = std::exp(a);
    const double coef = 2.0 * std::pow((gamma - 1.0) / (gamma + 1.0), 2.0);

    ContractionInequalityResult r;
    r.peak_value = std::exp(2.0 / (gamma - 1.0)) *
                   std::pow((gamma - 1.0) / (gamma + 1.0), 2.0);
    r.worst_value = 0.0;
    r.worst_xi = 1.0;
    for (int i = 0; i < samples; ++i) {
        const double xi = 1.0 + (xi_sup - 1.0) * static_cast<double>(i) / samples;
        const double ratio = xi_sup / xi;
        const double value = coef * ratio * ratio * std::log(xi);
        if (value > r.worst_value) {
            r.worst_value = value;
            r.worst_xi = xi;
        }
    }
    r.holds = r.worst_value < 1.0;
    return r;
}

double field_integral(const SolutionProfile& profile, double t_a, double t_b,
                      const Geometry& geom, int n_panels) {
    if (t_b == t_a) return 0.0;
    if (!(t_b > t_a)) throw FormulaDomainError("field_integral: t_b must be >= t_a");
    std::array<double, 2> y{};
    auto field_at = [&](double t) {
        profile.trajectory.dense_eval(t, y);
        return y[1] / geom.radius(t);
    };
    const double h = (t_b - t_a) / n_panels;
    double acc = 0.5 * (field_at(t_a) + field_at(t_b));
    for (int i = 1; i < n_panels; ++i) acc += field_at(t_a + i * h);
    return acc * h;
}

}  // namespace epshock
