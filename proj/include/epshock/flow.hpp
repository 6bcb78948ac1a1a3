#ifndef EPSHOCK_FLOW_HPP
#define EPSHOCK_FLOW_HPP

#include <string>
#include <vector>

#include "epshock/gas.hpp"
#include "epshock/ivp.hpp"
#include "epshock/jump.hpp"
#include "epshock/problem.hpp"

namespace epshock {

enum class Branch { supersonic, subsonic };

enum class SolveStatus { completed, guard_stopped, step_failure };

struct ProfileSample {
    double t;
    FlowState state;
    double mach2;
};

// One smooth branch of the flow: the integrated trajectory plus the full
// reconstructed states at the accepted nodes. The underlying trajectory state
// is (M^2, hat_t*E) on the supersonic branch and (rho, hat_t*E) on the
// subsonic branch.
struct SolutionProfile {
    Branch branch = Branch::supersonic;
    ConservedInvariants inv{};
    std::vector<ProfileSample> samples;
    double t_from = 0.0;
    double t_to = 0.0;    // requested end
    double t_stop = 0.0;  // achieved end
    SolveStatus status = SolveStatus::completed;
    std::string stop_guard;
    bool density_monotone = true;  // rho non-decreasing node-to-node (subsonic branch)
    ivp::Trajectory trajectory;

    const ProfileSample& first() const { return samples.front(); }
    const ProfileSample& last() const { return samples.back(); }
    FlowState state_at(double t, const GasLaw& gas, const Geometry& geom) const;
};

// Integrates the (M^2, E) system from the entrance to t_stop. The profile
// reports a guard stop if the flow decelerates into the sonic band.
SolutionProfile solve_upstream(const FlowState& entrance, const GasLaw& gas,
                               const Geometry& geom, const BackgroundCharge& b,
                               double t_stop, const Tolerances& tol);

// Integrates the (rho, E) system with entropy kappa_s from the post-shock
// state at t_s to t_exit. Guard stops: "sonic" (choking), "positivity",
// "density-blowup".
SolutionProfile solve_downstream(const FlowState& post_shock, double kappa_s, double t_s,
                                 const GasLaw& gas, const Geometry& geom,
                                 const BackgroundCharge& b, double t_exit,
                                 const Tolerances& tol);

// Computable sufficient conditions standing in for largeness assumptions on
// the entrance field. All values are reports, never gates.
struct Certificates {
    double delta0 = 0.0;            // 1 - 2(g-1)/(g+1) * ln(r0/r1)
    double beta1 = 0.0;             // b0 (r0^2 - r1^2) / 2
    double b0 = 0.0;
    double min_field_excess = 0.0;  // min over the upstream span of hat_t*E - K
    bool mach_monotone = true;      // upstream M^2 strictly increasing
    double mach_violation = 0.0;    // worst adjacent decrease, 0 if none
    double f_s_value = 0.0;         // downstream solvability margin at t_s
    double g_s_value = 0.0;         // upstream-only lower bound for f_s_value
    bool density_monotone = true;   // downstream rho non-decreasing
    bool downstream_checked = false;

    bool certified() const { return min_field_excess > 0.0 && f_s_value >= beta1; }
};

Certificates compute_certificates(const SolutionProfile& up, const GasLaw& gas,
                                  const Geometry& geom, const BackgroundCharge& b,
                                  const JumpRecord& jump,
                                  const SolutionProfile* down = nullptr);

// Grid check of the contraction-ratio inequality used by the gamma >= 2
// certificates: 2((g-1)/(g+1))^2 (e^A / xi)^2 ln(xi) < 1 on [1, e^A) for
// A = (g+1)/(2(g-1)). peak_value is the analytic maximum over xi > 0.
struct ContractionInequalityResult {
    bool holds = false;
    double worst_value = 0.0;
    double worst_xi = 1.0;
    double peak_value = 0.0;  // e^{2/(g-1)} ((g-1)/(g+1))^2
};

ContractionInequalityResult check_contraction_inequality(double gamma, int samples);

// Trapezoid of E over [t_a, t_b] on a uniform grid of the profile's dense
// interpolant. Used by the Bernoulli-field identities.
double field_integral(const SolutionProfile& profile, double t_a, double t_b,
                      const Geometry& geom, int n_panels = 8192);

}  // namespace epshock

#endif
