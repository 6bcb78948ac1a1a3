#ifndef EPSHOCK_TEST_SUPPORT_HPP
#define EPSHOCK_TEST_SUPPORT_HPP

#include <cmath>
#include <random>

#include "epshock/problem.hpp"

namespace epshock::testing {

// Reference convergent-nozzle configuration: gamma = 1.4, M0^2 = 4.
// E0 = 10 keeps hat_t*E - K positive on the whole span (certified);
// E0 = 0 decelerates and hits the sonic guard before the exit.
inline ProblemConfig reference_config(double E0 = 10.0) {
    ProblemConfig c;
    c.gamma = 1.4;
    c.r0 = 1.0;
    c.r1 = 0.5;
    c.rho0 = 1.0;
    c.u0 = 2.0;
    c.p0 = 1.0 / 1.4;
    c.E0 = E0;
    c.b = BackgroundCharge::constant(1.0);
    return c;
}

// Stiffer-gas configuration with gamma = 2 (the contraction-inequality regime).
inline ProblemConfig gamma2_config(double E0 = 10.0) {
    ProblemConfig c;
    c.gamma = 2.0;
    c.r0 = 1.0;
    c.r1 = 0.7;
    c.rho0 = 1.0;
    c.u0 = 2.0;
    c.p0 = 1.0;
    c.E0 = E0;
    c.b = BackgroundCharge::constant(1.0);
    return c;
}

inline bool rel_close(double a, double b, double tol, double floor = 0.0) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), floor});
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace epshock::testing

#endif
