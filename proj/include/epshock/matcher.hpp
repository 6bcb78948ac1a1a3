#ifndef EPSHOCK_MATCHER_HPP
#define EPSHOCK_MATCHER_HPP

#include <optional>

#include "epshock/sensitivity.hpp"

namespace epshock {

// A composed transonic shock solution: supersonic branch on [0, t_s], jump
// at t_s, subsonic branch on [t_s, T].
struct ShockSolution {
    SolutionProfile upstream;
    JumpRecord jump;
    SolutionProfile downstream;
    std::optional<SensitivityProfile> sensitivity;
    Certificates certificates;
    double exit_pressure = 0.0;
    double t_s = 0.0;
};

// Full composed solve at a prescribed shock location. Throws SolveError when
// the upstream hits the sonic guard before t_s, the jump is not transonic, or
// the downstream stops before the exit.
ShockSolution forward_solve(const ProblemConfig& config, double t_s,
                            bool with_sensitivity = false);

struct MapPoint {
    double t_s = 0.0;
    double p_exit = 0.0;
    Certificates certificates;
    bool ok = false;
    std::string error;
};

struct ExitPressureMap {
    std::vector<MapPoint> grid;
    bool complete = false;            // every grid point solved
    bool monotone_decreasing = false; // strict decrease over adjacent solved pairs
    double max_inversion_rel = 0.0;   // max of (p_{i+1}-p_i)/p_i over adjacent pairs
    bool certified = false;           // every point: field excess > 0 and F_s >= beta1
    double p_min = 0.0;
    double p_max = 0.0;
};

// Samples t_s |-> p_+(T; t_s) on a uniform grid over [0, T - 1e-8 T].
// max_threads == 0 uses all hardware threads.
ExitPressureMap exit_pressure_map(const ProblemConfig& config, int n_grid,
                                  unsigned max_threads = 0);

// Finds the shock location matching a prescribed exit pressure by bisection
// on the monotone map. Refuses (NonMonotoneMapError) when the map is neither
// certified nor empirically monotone, unless force is set.
ShockSolution match_exit_pressure(const ProblemConfig& config, const ExitPressureMap& map,
                                  double p_ex, double tol_ts, bool force = false);
ShockSolution match_exit_pressure(const ProblemConfig& config, double p_ex, double tol_ts,
                                  bool force = false);

struct IdentityReport {
    double bernoulli_form_residual = 0.0;       // G(p_exit, kappa_s) vs B at the exit
    double field_integral_residual_down = 0.0;  // B_+(T) - B_-(t_s) - int E_+
    double field_integral_residual_up = 0.0;    // B_-(t_s) - B_-(0) - int E_-
    double g_p = 0.0;
    bool exit_subsonic = false;
};

IdentityReport bernoulli_exit_identities(const ShockSolution& sol, const GasLaw& gas,
                                         const Geometry& geom);

// The Bernoulli function at the exit written in (p, kappa): the value every
// exit state must reproduce.
double bernoulli_exit_form(double p, double kappa, double m0, double hat_exit,
                           const GasLaw& gas);

}  // namespace epshock

#endif
