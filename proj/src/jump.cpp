#include "epshock/jump.hpp"

#include <cmath>

namespace epshock {

namespace detail {

FlowState rankine_hugoniot_state(const FlowState& up, double k_minus) {
    return {up.rho * up.u * up.u / k_minus,
            k_minus / up.u,
            up.rho * up.u * up.u + up.p - up.rho * k_minus,
            up.E};
}

}  // namespace detail

JumpRecord apply_jump(const FlowState& upstream, double t_s, const GasLaw& gas,
                      const Geometry& geom, double supersonic_margin) {
    upstream.validate();
    if (!(t_s >= 0.0 && t_s < geom.span()))
        throw FormulaDomainError("apply_jump: t_s must lie in [0, span)");
    const double m2_minus = mach_squared(upstream, gas);
    if (!(m2_minus >= 1.0 + supersonic_margin))
        throw SolveError(SolveError::Kind::non_transonic,
                         "apply_jump: upstream state is not supersonic beyond the margin",
                         "supersonic-margin", t_s);

    const double k_minus = critical_speed_squared(upstream, gas);
    const FlowState down = detail::rankine_hugoniot_state(upstream, k_minus);
    JumpRecord j;
    j.t_s = t_s;
    j.upstream = upstream;
    j.downstream = down;
    j.k_minus = k_minus;
    j.kappa_s = down.p / std::pow(down.rho, gas.gamma);
    j.mach2_minus = m2_minus;
    j.mach2_plus = mach_squared(down, gas);
    return j;
}

static double rel(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

AdmissibilityReport check_admissibility(const JumpRecord& j, const GasLaw& gas) {
    AdmissibilityReport r;
    const FlowState& up = j.upstream;
    const FlowState& dn = j.downstream;

    r.speed_ordered = dn.u > 0.0 && dn.u < up.u;
    const double kappa_minus = up.p / std::pow(up.rho, gas.gamma);
    r.entropy_increases = j.kappa_s > kappa_minus;
    r.transonic = j.mach2_minus > 1.0 && j.mach2_plus < 1.0;
    r.admissible = r.speed_ordered && r.entropy_increases && r.transonic;

    r.mach_identity_residual =
        rel(j.mach2_plus - 1.0, -(up.p / dn.p) * (j.mach2_minus - 1.0));
    r.mass_residual = rel(up.rho * up.u, dn.rho * dn.u);
    r.momentum_residual = rel(up.rho * up.u * up.u + up.p, dn.rho * dn.u * dn.u + dn.p);
    r.bernoulli_residual = rel(bernoulli(up, gas), bernoulli(dn, gas));
    r.field_residual = rel(up.E, dn.E);
    return r;
}

EntropyRatio shock_entropy_ratio(double mach2, const GasLaw& gas) {
    if (!(mach2 > 0.0)) throw FormulaDomainError("shock_entropy_ratio requires M^2 > 0");
    const double g = gas.gamma;
    const double gp1 = g + 1.0;
    const double base = (g - 1.0) / gp1 + 2.0 / (gp1 * mach2);
    EntropyRatio out;
    out.value = (2.0 * g * mach2 - (g - 1.0)) / gp1 * std::pow(base, g);
    const double dev = 1.0 / mach2 - 1.0;
    out.derivative = 2.0 * g * (g - 1.0) / (gp1 * gp1) * std::pow(base, g - 1.0) * dev * dev;
    return out;
}

}  // namespace epshock
