#ifndef EPSHOCK_GAS_HPP
#define EPSHOCK_GAS_HPP

#include <utility>
#include <vector>

#include "epshock/errors.hpp"

namespace epshock {

// Ideal polytropic gas, p = kappa * rho^gamma.
struct GasLaw {
    double gamma;  // adiabatic exponent, > 1
    double kappa;  // entropy constant, > 0

    void validate() const;
};

// Annular nozzle r1 < r < r0, traversed inward. The nozzle coordinate is
// t = r0 - r, so t = 0 is the entrance and t = span() the exit.
struct Geometry {
    double r0;  // entrance radius
    double r1;  // exit radius

    double span() const { return r0 - r1; }
    double radius(double t) const { return r0 - t; }

    void validate() const;
};

// Background ion charge density b(t) > 0, either constant or a table with
// linear interpolation (clamped outside the knot range).
class BackgroundCharge {
  public:
    static BackgroundCharge constant(double value);
    static BackgroundCharge table(std::vector<std::pair<double, double>> knots);

    double operator()(double t) const;
    // Upper bound b0: exact for a constant, the max knot value for a table.
    double bound() const { return bound_; }
    bool is_constant() const { return knots_.empty(); }
    double constant_value() const { return value_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  private:
    BackgroundCharge() = default;
    double value_ = 0.0;
    double bound_ = 0.0;
    std::vector<std::pair<double, double>> knots_;  // empty for constant
};

// Pointwise radial flow state in nozzle variables. u and E are the inward
// components after the sign flip, so both are positive for the flows of
// interest (E may carry any sign; certificates require positivity).
struct FlowState {
    double rho;  // density
    double u;    // speed
    double p;    // pressure
    double E;    // electric field strength

    void validate() const;
};

// Quantities conserved along each smooth branch: the mass flux constant
// hat_t*rho*u and the branch entropy p/rho^gamma.
struct ConservedInvariants {
    double m0;
    double kappa;
};

ConservedInvariants entrance_invariants(const FlowState& entrance, const GasLaw& gas,
                                        const Geometry& geom);

// Derived constants of the algebraic closure for fixed (gamma, kappa, m0):
//   c^2 = sound_scale   * (hat_t^2 M^2)^{-(gamma-1)/(gamma+1)}
//   rho = density_scale * (hat_t^2 M^2)^{-1/(gamma+1)}
// Cached once per branch; every right-hand-side evaluation uses them.
struct Closure {
    double gamma;
    double kappa;
    double m0;
    double sound_scale;
    double density_scale;

    static Closure make(const GasLaw& gas, const ConservedInvariants& inv);

    double density_from_mach2(double hat_t, double m2) const;
    double mach2_from_density(double hat_t, double rho) const;

    // Full state from the (M^2, E) sample of the supersonic system.
    FlowState state_from_mach2(double hat_t, double m2, double E) const;
    // Full state from the (rho, E) sample of the subsonic system.
    FlowState state_from_density(double hat_t, double rho, double E) const;
};

// M^2 = u^2 rho / (gamma p).
double mach_squared(const FlowState& s, const GasLaw& gas);

// B = u^2/2 + gamma p / ((gamma-1) rho).
double bernoulli(const FlowState& s, const GasLaw& gas);

// Critical speed squared K = 2(gamma-1)/(gamma+1) * B. The flow is sonic
// exactly where u^2 = K, and hat_t*E - K > 0 is the acceleration certificate.
double critical_speed_squared(const FlowState& s, const GasLaw& gas);

// rho as a function of (t, M^2) through the conserved pair.
double density_from_mach2(double t, double m2, const ConservedInvariants& inv,
                          const GasLaw& gas, const Geometry& geom);

// d(M^2)/dt of the (M^2, E) formulation.
double mach2_rate(double t, double m2, double E, const GasLaw& gas,
                  const ConservedInvariants& inv, const Geometry& geom,
                  double sonic_guard = 1e-6);

// Same rate written through the field excess hat_t*E - K; used as the
// algebraic cross-check of mach2_rate and for the sign diagnostics.
double mach2_rate_critical_form(double t, double m2, double E, const GasLaw& gas,
                                const ConservedInvariants& inv, const Geometry& geom,
                                double sonic_guard = 1e-6);

// d(hat_t E)/dt of the (M^2, E) formulation: hat_t * (rho(t, M^2) - b(t)).
double field_rate_from_mach2(double t, double m2, const GasLaw& gas,
                             const ConservedInvariants& inv, const Geometry& geom,
                             const BackgroundCharge& b);

// d(rho)/dt of the (rho, E) formulation.
double density_rate(double t, double rho, double E, const GasLaw& gas,
                    const ConservedInvariants& inv, const Geometry& geom,
                    double sonic_guard = 1e-6);

// Equivalent subsonic form rho^{2-gamma} (hat_t E - u^2) / (hat_t gamma kappa (1 - M^2)).
double density_rate_subsonic_form(double t, double rho, double E, const GasLaw& gas,
                                  const ConservedInvariants& inv, const Geometry& geom,
                                  double sonic_guard = 1e-6);

// d(hat_t E)/dt = hat_t * (rho - b(t)).
double field_rate_from_density(double t, double rho, const Geometry& geom,
                               const BackgroundCharge& b);

namespace detail {

// Unchecked right-hand sides for use inside integration loops. A trial step
// may momentarily cross the sonic line; these return IEEE inf/nan there and
// the step-size controller rejects the step.
double mach2_rate_raw(const Closure& cl, double hat_t, double m2, double E);
double field_rate_from_mach2_raw(const Closure& cl, double t, double hat_t, double m2,
                                 const BackgroundCharge& b);
double density_rate_raw(const Closure& cl, double hat_t, double rho, double E);
double field_rate_from_density_raw(double t, double hat_t, double rho,
                                   const BackgroundCharge& b);

}  // namespace detail

}  // namespace epshock

#endif
