#include "epshock/sensitivity.hpp"

#include <array>
#include <cmath>

namespace epshock {

double SensitivityProfile::x_at(double t) const {
    std::array<double, 2> z{};
    trajectory.dense_eval(t, z);
    return z[0];
}

double SensitivityProfile::y_at(double t, const Geometry& geom) const {
    std::array<double, 2> z{};
    trajectory.dense_eval(t, z);
    return z[1] / geom.radius(t);
}

SensitivityIc sensitivity_ic_from_slope(const JumpRecord& jump, double mach2_slope,
                                        const GasLaw& gas) {
    const double g = gas.gamma;
    const double kappa0 = jump.upstream.p / std::pow(jump.upstream.rho, g);
    const double m2 = jump.mach2_minus;
    const double u_s = jump.downstream.u;

    SensitivityIc ic;
    ic.mach2_slope = mach2_slope;
    ic.x0 = -2.0 * g * g * kappa0 / ((g + 1.0) * (g + 1.0)) *
            std::pow(jump.upstream.rho, g) / (u_s * u_s) * (m2 - 1.0) / m2 * mach2_slope;
    ic.y0 = jump.upstream.rho - jump.downstream.rho;
    ic.dkappa_dts = shock_entropy_ratio(m2, gas).derivative * mach2_slope * kappa0;
    return ic;
}

SensitivityIc jump_sensitivity_ic(const SolutionProfile& up, const JumpRecord& jump,
                                  const GasLaw& gas, const Geometry& geom) {
    if (up.branch != Branch::supersonic)
        throw FormulaDomainError("jump_sensitivity_ic: upstream profile required");
    if (std::abs(up.t_stop - jump.t_s) > 1e-12 * geom.r0)
        throw FormulaDomainError("jump_sensitivity_ic: upstream profile must end at t_s");

    const Closure cl = Closure::make(gas, up.inv);
    const double hat_s = geom.radius(jump.t_s);
    const double slope =
        detail::mach2_rate_raw(cl, hat_s, jump.mach2_minus, jump.upstream.E);
    return sensitivity_ic_from_slope(jump, slope, gas);
}

SensitivityProfile integrate_sensitivity(const SolutionProfile& down, const SensitivityIc& ic,
                                         const GasLaw& gas, const Geometry& geom,
                                         const Tolerances& tol) {
    if (down.branch != Branch::subsonic)
        throw FormulaDomainError("integrate_sensitivity: downstream profile required");
    if (down.status != SolveStatus::completed)
        throw FormulaDomainError("integrate_sensitivity: downstream solve did not reach its exit");

    const double t_s = down.t_from;
    const double g = gas.gamma;
    const double kappa_s = down.inv.kappa;
    const Closure cl = Closure::make(gas, down.inv);
    const double hat_s = geom.radius(t_s);
    const double dkappa = ic.dkappa_dts;
    const double guard_band = tol.sonic_guard;

    ivp::IvpProblem problem;
    problem.dimension = 2;
    problem.t_start = t_s;
    problem.t_end = down.t_stop;
    problem.y_start = {ic.x0, hat_s * ic.y0};
    std::array<double, 2> flow{};  // (rho, hat_t * E) of the base trajectory
    problem.rhs = [&, guard_band](double t, std::span<const double> z, std::span<double> dz) {
        const double hat_t = geom.radius(t);
        down.trajectory.dense_eval(t, flow);
        const double rho = flow[0];
        const double E = flow[1] / hat_t;
        const double m2 = cl.mach2_from_density(hat_t, rho);
        const double denom = 1.0 - m2;
        if (denom < guard_band)
            throw SonicDegeneracyError(
                "integrate_sensitivity: variational coefficients blow up at the sonic band");
        const double rho_rate = detail::density_rate_raw(cl, hat_t, rho, E);
        const double a1 = std::pow(rho, 2.0 - g) / (g * kappa_s * denom);
        const double a2 = -rho_rate / (kappa_s * denom);
        const double a3 = rho_rate / rho * ((2.0 - g) - 3.0 * m2) / denom +
                          2.0 * m2 / (hat_t * denom);
        dz[0] = a3 * z[0] + a2 * dkappa + a1 * z[1] / hat_t;
        dz[1] = hat_t * z[0];
    };

    SensitivityProfile sens;
    sens.t_s = t_s;
    sens.x_initial = ic.x0;
    sens.y_initial = ic.y0;
    sens.dkappa_dts = dkappa;
    sens.trajectory = ivp::integrate(problem, {tol.rtol, tol.atol, tol.max_steps});
    if (sens.trajectory.status != ivp::IntegrationStatus::completed)
        throw SolveError(SolveError::Kind::step_failure,
                         "integrate_sensitivity: variational integration failed",
                         sens.trajectory.failure_reason, sens.trajectory.t_reached());

    sens.samples.reserve(sens.trajectory.size());
    for (std::size_t i = 0; i < sens.trajectory.size(); ++i) {
        const double t = sens.trajectory.time(i);
        const auto z = sens.trajectory.state(i);
        sens.samples.push_back({t, z[0], z[1] / geom.radius(t)});
    }
    return sens;
}

PressureSensitivity pressure_sensitivity(const SolutionProfile& down,
                                         const SensitivityProfile& sens, const GasLaw& gas,
                                         const Geometry& geom) {
    if (down.samples.empty() || sens.samples.empty())
        throw FormulaDomainError("pressure_sensitivity: empty profiles");

    const double g = gas.gamma;
    const double kappa_s = down.inv.kappa;
    const double m0 = down.inv.m0;
    const auto& exit = down.last();
    const double hat_exit = geom.radius(exit.t);
    const double p_exit = exit.state.p;

    PressureSensitivity out;
    out.g_p = (1.0 - exit.mach2) / exit.state.rho;
    if (!(out.g_p > 0.0))
        throw SonicDegeneracyError("pressure_sensitivity: exit state is not subsonic");
    out.g_kappa = m0 * m0 * std::pow(kappa_s, 2.0 / g - 1.0) /
                      (g * hat_exit * hat_exit * std::pow(p_exit, 2.0 / g)) +
                  std::pow(p_exit / kappa_s, 1.0 - 1.0 / g) / (g - 1.0);

    // dB_+/dt_s by quadrature of Y over the dense interpolant.
    const int n_panels = 8192;
    const double t_a = sens.trajectory.t_begin();
    const double t_b = sens.trajectory.t_reached();
    std::array<double, 2> z{};
    auto y_at = [&](double t) {
        sens.trajectory.dense_eval(t, z);
        return z[1] / geom.radius(t);
    };
    const double h = (t_b - t_a) / n_panels;
    double acc = 0.5 * (y_at(t_a) + y_at(t_b));
    for (int i = 1; i < n_panels; ++i) acc += y_at(t_a + i * h);
    out.db_dts = acc * h;

    // Same derivative through the exit state: dp via (X, dkappa), then the
    // chain rule on the Bernoulli form.
    const double x_exit = sens.samples.back().x;
    const double dp_via_x =
        p_exit / kappa_s * sens.dkappa_dts + g * p_exit / exit.state.rho * x_exit;
    out.db_dts_algebraic = out.g_p * dp_via_x + out.g_kappa * sens.dkappa_dts;

    const double scale = std::max(std::abs(out.db_dts), std::abs(out.db_dts_algebraic));
    out.route_residual = scale > 0.0 ? std::abs(out.db_dts - out.db_dts_algebraic) / scale : 0.0;
    if (out.route_residual > 1e-6 &&
        std::abs(out.db_dts - out.db_dts_algebraic) >
            1e-12 * (1.0 + std::abs(out.g_kappa * sens.dkappa_dts)))
        throw Error("pressure_sensitivity: dB routes disagree beyond 1e-6");

    out.dp_dts = (out.db_dts - out.g_kappa * sens.dkappa_dts) / out.g_p;
    return out;
}

}  // namespace epshock
