#ifndef EPSHOCK_JUMP_HPP
#define EPSHOCK_JUMP_HPP

#include "epshock/gas.hpp"

namespace epshock {

// State pair linked by the Rankine-Hugoniot conditions at t = t_s, together
// with the downstream entropy constant. Mass flux, momentum flux, Bernoulli
// and the field are continuous across the jump; the entropy rises.
struct JumpRecord {
    double t_s;
    FlowState upstream;
    FlowState downstream;
    double kappa_s;      // downstream entropy p_s / rho_s^gamma
    double k_minus;      // critical speed squared of the upstream state
    double mach2_minus;
    double mach2_plus;
};

// Applies the jump conditions to a supersonic state. States with
// M^2 < 1 + supersonic_margin are rejected (the jump degenerates to the
// identity at the sonic point and is not a transonic shock).
JumpRecord apply_jump(const FlowState& upstream, double t_s, const GasLaw& gas,
                      const Geometry& geom, double supersonic_margin = 1e-9);

struct AdmissibilityReport {
    bool speed_ordered = false;      // 0 < u_s < u_-
    bool entropy_increases = false;  // kappa_s > kappa_-
    bool transonic = false;          // M_-^2 > 1 > M_s^2
    bool admissible = false;
    double mach_identity_residual = 0.0;  // M_s^2 - 1 vs -(p_-/p_s)(M_-^2 - 1), relative
    double mass_residual = 0.0;
    double momentum_residual = 0.0;
    double bernoulli_residual = 0.0;
    double field_residual = 0.0;
};

AdmissibilityReport check_admissibility(const JumpRecord& j, const GasLaw& gas);

struct EntropyRatio {
    double value;       // kappa_s / kappa_0 as a function of upstream M^2
    double derivative;
};

// The post-shock entropy ratio f with f(1) = 1 and f' > 0 for x > 0;
// kappa_s = f(M_-^2) * kappa_0.
EntropyRatio shock_entropy_ratio(double mach2, const GasLaw& gas);

namespace detail {

// Raw jump algebra without the supersonic margin check (identity at M = 1).
FlowState rankine_hugoniot_state(const FlowState& upstream, double k_minus);

}  // namespace detail

}  // namespace epshock

#endif
