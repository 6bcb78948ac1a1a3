#include "epshock/gas.hpp"

#include <algorithm>
#include <cmath>

namespace epshock {

void GasLaw::validate() const {
    if (!(gamma > 1.0)) throw ConfigError("gas law requires gamma > 1");
    if (!(kappa > 0.0)) throw ConfigError("gas law requires kappa > 0");
}

void Geometry::validate() const {
    if (!(r0 > r1 && r1 > 0.0)) throw ConfigError("geometry requires r0 > r1 > 0");
}

void FlowState::validate() const {
    if (!(rho > 0.0 && u > 0.0 && p > 0.0))
        throw ConfigError("flow state requires rho > 0, u > 0, p > 0");
}

BackgroundCharge BackgroundCharge::constant(double value) {
    if (!(value > 0.0)) throw ConfigError("background charge must be positive");
    BackgroundCharge b;
    b.value_ = value;
    b.bound_ = value;
    return b;
}

BackgroundCharge BackgroundCharge::table(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) throw ConfigError("background charge table needs at least one knot");
    double bound = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!(knots[i].second > 0.0))
            throw ConfigError("background charge table values must be positive");
        if (i > 0 && !(knots[i].first > knots[i - 1].first))
            throw ConfigError("background charge table knots must be strictly increasing in t");
        bound = std::max(bound, knots[i].second);
    }
    BackgroundCharge b;
    b.knots_ = std::move(knots);
    b.bound_ = bound;
    return b;
}

double BackgroundCharge::operator()(double t) const {
    if (knots_.empty()) return value_;
    if (t <= knots_.front().first) return knots_.front().second;
    if (t >= knots_.back().first) return knots_.back().second;
    auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double x, const auto& k) { return x < k.first; });
    auto lo = hi - 1;
    double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

ConservedInvariants entrance_invariants(const FlowState& entrance, const GasLaw& gas,
                                        const Geometry& geom) {
    entrance.validate();
    return {geom.r0 * entrance.rho * entrance.u,
            entrance.p / std::pow(entrance.rho, gas.gamma)};
}

Closure Closure::make(const GasLaw& gas, const ConservedInvariants& inv) {
    if (!(inv.m0 > 0.0)) throw FormulaDomainError("closure requires m0 > 0");
    if (!(inv.kappa > 0.0)) throw FormulaDomainError("closure requires kappa > 0");
    const double g = gas.gamma;
    const double gk = g * inv.kappa;
    Closure cl;
    cl.gamma = g;
    cl.kappa = inv.kappa;
    cl.m0 = inv.m0;
    cl.sound_scale = gk * std::pow(inv.m0 * inv.m0 / gk, (g - 1.0) / (g + 1.0));
    cl.density_scale = std::pow(inv.m0 * inv.m0 / gk, 1.0 / (g + 1.0));
    return cl;
}

double Closure::density_from_mach2(double hat_t, double m2) const {
    return density_scale * std::pow(hat_t * hat_t * m2, -1.0 / (gamma + 1.0));
}

double Closure::mach2_from_density(double hat_t, double rho) const {
    return m0 * m0 / (gamma * kappa * hat_t * hat_t * std::pow(rho, gamma + 1.0));
}

FlowState Closure::state_from_mach2(double hat_t, double m2, double E) const {
    const double rho = density_from_mach2(hat_t, m2);
    return {rho, m0 / (hat_t * rho), kappa * std::pow(rho, gamma), E};
}

FlowState Closure::state_from_density(double hat_t, double rho, double E) const {
    return {rho, m0 / (hat_t * rho), kappa * std::pow(rho, gamma), E};
}

double mach_squared(const FlowState& s, const GasLaw& gas) {
    return s.u * s.u * s.rho / (gas.gamma * s.p);
}

double bernoulli(const FlowState& s, const GasLaw& gas) {
    return 0.5 * s.u * s.u + gas.gamma * s.p / ((gas.gamma - 1.0) * s.rho);
}

double critical_speed_squared(const FlowState& s, const GasLaw& gas) {
    return 2.0 * (gas.gamma - 1.0) / (gas.gamma + 1.0) * bernoulli(s, gas);
}

double density_from_mach2(double t, double m2, const ConservedInvariants& inv,
                          const GasLaw& gas, const Geometry& geom) {
    if (!(m2 > 0.0)) throw FormulaDomainError("density_from_mach2 requires M^2 > 0");
    return Closure::make(gas, inv).density_from_mach2(geom.radius(t), m2);
}

namespace detail {

double mach2_rate_raw(const Closure& cl, double hat_t, double m2, double E) {
    const double g = cl.gamma;
    const double field = (g + 1.0) / cl.sound_scale * E *
                         std::pow(hat_t * hat_t * m2, (g - 1.0) / (g + 1.0));
    const double geometric = (2.0 + (g - 1.0) * m2) / hat_t;
    return m2 / (m2 - 1.0) * (field - geometric);
}

double field_rate_from_mach2_raw(const Closure& cl, double t, double hat_t, double m2,
                                 const BackgroundCharge& b) {
    return hat_t * (cl.density_from_mach2(hat_t, m2) - b(t));
}

double density_rate_raw(const Closure& cl, double hat_t, double rho, double E) {
    const double u2 = cl.m0 * cl.m0 / (hat_t * hat_t * rho * rho);
    const double c2 = cl.gamma * cl.kappa * std::pow(rho, cl.gamma - 1.0);
    return rho * (hat_t * E - u2) / (hat_t * (c2 - u2));
}

double field_rate_from_density_raw(double t, double hat_t, double rho,
                                   const BackgroundCharge& b) {
    return hat_t * (rho - b(t));
}

}  // namespace detail

static void require_positive_mach2(double m2, const char* who) {
    if (!(m2 > 0.0)) throw FormulaDomainError(std::string(who) + " requires M^2 > 0");
}

static void require_off_sonic(double m2, double sonic_guard, const char* who) {
    if (std::abs(m2 - 1.0) < sonic_guard)
        throw SonicDegeneracyError(std::string(who) + ": |M^2 - 1| inside sonic guard band");
}

double mach2_rate(double t, double m2, double E, const GasLaw& gas,
                  const ConservedInvariants& inv, const Geometry& geom,
                  double sonic_guard) {
    require_positive_mach2(m2, "mach2_rate");
    require_off_sonic(m2, sonic_guard, "mach2_rate");
    return detail::mach2_rate_raw(Closure::make(gas, inv), geom.radius(t), m2, E);
}

double mach2_rate_critical_form(double t, double m2, double E, const GasLaw& gas,
                                const ConservedInvariants& inv, const Geometry& geom,
                                double sonic_guard) {
    require_positive_mach2(m2, "mach2_rate_critical_form");
    require_off_sonic(m2, sonic_guard, "mach2_rate_critical_form");
    const Closure cl = Closure::make(gas, inv);
    const double g = gas.gamma;
    const double hat_t = geom.radius(t);
    const double c2 = cl.sound_scale * std::pow(hat_t * hat_t * m2, -(g - 1.0) / (g + 1.0));
    const double k = c2 * (2.0 + (g - 1.0) * m2) / (g + 1.0);
    return (g + 1.0) / cl.sound_scale * std::pow(hat_t, (g - 3.0) / (g + 1.0)) *
           std::pow(m2, 2.0 * g / (g + 1.0)) / (m2 - 1.0) * (hat_t * E - k);
}

double field_rate_from_mach2(double t, double m2, const GasLaw& gas,
                             const ConservedInvariants& inv, const Geometry& geom,
                             const BackgroundCharge& b) {
    require_positive_mach2(m2, "field_rate_from_mach2");
    return detail::field_rate_from_mach2_raw(Closure::make(gas, inv), t, geom.radius(t), m2, b);
}

double density_rate(double t, double rho, double E, const GasLaw& gas,
                    const ConservedInvariants& inv, const Geometry& geom,
                    double sonic_guard) {
    if (!(rho > 0.0)) throw FormulaDomainError("density_rate requires rho > 0");
    const Closure cl = Closure::make(gas, inv);
    const double hat_t = geom.radius(t);
    require_off_sonic(cl.mach2_from_density(hat_t, rho), sonic_guard, "density_rate");
    return detail::density_rate_raw(cl, hat_t, rho, E);
}

double density_rate_subsonic_form(double t, double rho, double E, const GasLaw& gas,
                                  const ConservedInvariants& inv, const Geometry& geom,
                                  double sonic_guard) {
    if (!(rho > 0.0)) throw FormulaDomainError("density_rate requires rho > 0");
    const Closure cl = Closure::make(gas, inv);
    const double g = gas.gamma;
    const double hat_t = geom.radius(t);
    const double m2 = cl.mach2_from_density(hat_t, rho);
    require_off_sonic(m2, sonic_guard, "density_rate_subsonic_form");
    const double u2 = cl.m0 * cl.m0 / (hat_t * hat_t * rho * rho);
    return std::pow(rho, 2.0 - g) * (hat_t * E - u2) /
           (hat_t * g * cl.kappa * (1.0 - m2));
}

double field_rate_from_density(double t, double rho, const Geometry& geom,
                               const BackgroundCharge& b) {
    if (!(rho > 0.0)) throw FormulaDomainError("field_rate_from_density requires rho > 0");
    return detail::field_rate_from_density_raw(t, geom.radius(t), rho, b);
}

}  // namespace epshock
