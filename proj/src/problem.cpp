#include "epshock/problem.hpp"

#include <cmath>

namespace epshock {

void Tolerances::validate() const {
    if (!(rtol > 0.0 && rtol <= 1e-3)) throw ConfigError("rtol must lie in (0, 1e-3]");
    if (!(atol > 0.0)) throw ConfigError("atol must be positive");
    if (!(sonic_guard > 0.0 && sonic_guard <= 1e-2))
        throw ConfigError("sonic_guard must lie in (0, 1e-2]");
    if (!(tol_ts > 0.0 && tol_ts < 1.0)) throw ConfigError("tol_ts must lie in (0, 1)");
    if (!(fd_step > 0.0 && fd_step < 1e-1)) throw ConfigError("fd_step must lie in (0, 0.1)");
    if (max_steps < 100) throw ConfigError("max_steps must be at least 100");
}

double ProblemConfig::entrance_kappa_denominator() const {
    return std::pow(rho0, gamma);
}

ConservedInvariants ProblemConfig::entrance_inv() const {
    return {r0 * rho0 * u0, p0 / entrance_kappa_denominator()};
}

void ProblemConfig::validate() const {
    if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
    geometry().validate();
    entrance().validate();
    if (!(mach0_squared() >= 1.0 + entrance_margin))
        throw ConfigError("entrance flow must be supersonic: M0^2 >= 1 + 1e-6");
    tol.validate();
    if (p_ex && !(*p_ex > 0.0)) throw ConfigError("p_ex must be positive");
    if (n_grid < 2) throw ConfigError("n_grid must be at least 2");
    if (diag_grid < 2) throw ConfigError("diag_grid must be at least 2");
    if (pineq_samples < 100) throw ConfigError("pineq_samples must be at least 100");
}

}  // namespace epshock
