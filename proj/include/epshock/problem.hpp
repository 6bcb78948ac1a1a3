#ifndef EPSHOCK_PROBLEM_HPP
#define EPSHOCK_PROBLEM_HPP

#include <optional>

#include "epshock/gas.hpp"

namespace epshock {

struct Tolerances {
    double rtol = 1e-10;       // relative integration tolerance, in (0, 1e-3]
    double atol = 1e-12;       // absolute integration tolerance
    double sonic_guard = 1e-6; // |M^2 - 1| band treated as degenerate
    double tol_ts = 1e-9;      // shock-location bisection tolerance, relative to span
    double fd_step = 1e-5;     // finite-difference step for oracles, relative to span
    long max_steps = 1000000;

    void validate() const;
};

// Entrance data, geometry, background charge and solver knobs for one run.
struct ProblemConfig {
    double gamma = 0.0;
    double r0 = 0.0;
    double r1 = 0.0;
    double rho0 = 0.0;
    double u0 = 0.0;
    double p0 = 0.0;
    double E0 = 0.0;
    BackgroundCharge b = BackgroundCharge::constant(1.0);
    std::optional<double> p_ex;
    Tolerances tol;
    int n_grid = 21;         // default sweep/map resolution
    int diag_grid = 9;       // shock locations sampled by diagnose
    int pineq_samples = 1000;
    unsigned long seed = 0;  // seed echoed to randomized test drivers

    // Entrance supersonicity is required with margin M0^2 >= 1 + this.
    static constexpr double entrance_margin = 1e-6;

    GasLaw gas() const { return {gamma, p0 / entrance_kappa_denominator()}; }
    Geometry geometry() const { return {r0, r1}; }
    FlowState entrance() const { return {rho0, u0, p0, E0}; }
    ConservedInvariants entrance_inv() const;
    double mach0_squared() const { return u0 * u0 * rho0 / (gamma * p0); }

    void validate() const;  // throws ConfigError

  private:
    double entrance_kappa_denominator() const;
};

}  // namespace epshock

#endif
