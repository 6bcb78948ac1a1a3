#ifndef EPSHOCK_SENSITIVITY_HPP
#define EPSHOCK_SENSITIVITY_HPP

#include "epshock/flow.hpp"

namespace epshock {

// Initial data at t = t_s for the variational pair
//   X = d(rho_+)/d(t_s),  Y = d(E_+)/d(t_s),
// together with the shock-entropy derivative d(kappa_s)/d(t_s).
struct SensitivityIc {
    double x0;
    double y0;
    double dkappa_dts;
    double mach2_slope;  // d(M_-^2)/dt at t_s along the upstream solution
};

SensitivityIc jump_sensitivity_ic(const SolutionProfile& up, const JumpRecord& jump,
                                  const GasLaw& gas, const Geometry& geom);

// The same initial data for a given upstream Mach slope; all three outputs
// are linear in the slope.
SensitivityIc sensitivity_ic_from_slope(const JumpRecord& jump, double mach2_slope,
                                        const GasLaw& gas);

struct SensitivitySample {
    double t;
    double x;
    double y;
};

struct SensitivityProfile {
    double t_s = 0.0;
    std::vector<SensitivitySample> samples;
    double x_initial = 0.0;
    double y_initial = 0.0;
    double dkappa_dts = 0.0;
    ivp::Trajectory trajectory;  // state (X, hat_t * Y)

    double x_at(double t) const;
    double y_at(double t, const Geometry& geom) const;
};

// Integrates the linear variational system along the stored downstream
// trajectory; coefficients are evaluated from its dense interpolant.
SensitivityProfile integrate_sensitivity(const SolutionProfile& down, const SensitivityIc& ic,
                                         const GasLaw& gas, const Geometry& geom,
                                         const Tolerances& tol);

struct PressureSensitivity {
    double dp_dts = 0.0;            // exit-pressure derivative in the shock location
    double db_dts = 0.0;            // dB_+/dt_s from the integral of Y
    double db_dts_algebraic = 0.0;  // dB_+/dt_s from the exit-state chain rule
    double g_p = 0.0;               // (1 - M_+^2)/rho_+ at the exit
    double g_kappa = 0.0;
    double route_residual = 0.0;    // relative disagreement of the two dB routes
};

PressureSensitivity pressure_sensitivity(const SolutionProfile& down,
                                         const SensitivityProfile& sens, const GasLaw& gas,
                                         const Geometry& geom);

}  // namespace epshock

#endif
