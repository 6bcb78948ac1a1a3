#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "epshock/jump.hpp"
#include "test_support.hpp"

using namespace epshock;
using epshock::testing::rel_err;

namespace {

const GasLaw air{1.4, 5.0 / 7.0};
const Geometry geom{1.0, 0.5};

// Classical normal-shock Mach relation, the independent oracle for apply_jump.
double classic_post_shock_mach2(double m2, double g) {
    return (2.0 + (g - 1.0) * m2) / (2.0 * g * m2 - (g - 1.0));
}

FlowState supersonic_state(double m2, double g, double rho, double p, double E = 1.0) {
    return {rho, std::sqrt(m2 * g * p / rho), p, E};
}

}  // namespace

TEST_CASE("worked jump: gamma = 1.4, M^2 = 4") {
    const FlowState up{1.0, 2.0, 1.0 / 1.4, 3.0};
    const JumpRecord j = apply_jump(up, 0.2, air, geom);

    CHECK(j.k_minus == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(j.mach2_minus == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(j.downstream.rho == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
    CHECK(j.downstream.u == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(j.downstream.p == doctest::Approx(45.0 / 14.0).epsilon(1e-12));
    CHECK(j.mach2_plus == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(j.downstream.E == up.E);

    // Bernoulli is conserved: 0.28125 + 4.21875 = 4.5 on the downstream side.
    CHECK(bernoulli(j.downstream, air) == doctest::Approx(4.5).epsilon(1e-13));
    CHECK(bernoulli(j.upstream, air) == doctest::Approx(4.5).epsilon(1e-13));

    // kappa_s = f(4) kappa_0 with f(4) ~ 1.13987.
    const EntropyRatio f4 = shock_entropy_ratio(4.0, air);
    CHECK(f4.value == doctest::Approx(1.13987).epsilon(1e-4));
    CHECK(rel_err(j.kappa_s, f4.value * (5.0 / 7.0)) <= 1e-12);
}

TEST_CASE("post-shock Mach matches the classical relation over a grid") {
    const double gammas[] = {1.2, 1.4, 5.0 / 3.0, 2.0, 3.0};
    for (double g : gammas) {
        const GasLaw gas{g, 1.0};
        for (int k = 0; k < 50; ++k) {
            const double m2 = std::exp(std::log(1.02) +
                                       (std::log(100.0) - std::log(1.02)) * k / 49.0);
            const FlowState up = supersonic_state(m2, g, 1.3, 0.8);
            const JumpRecord j = apply_jump(up, 0.1, gas, geom);
            CHECK(rel_err(j.mach2_plus, classic_post_shock_mach2(m2, g)) <= 1e-12);

            const AdmissibilityReport rep = check_admissibility(j, gas);
            CHECK(rep.admissible);
            CHECK(rep.mach_identity_residual <= 1e-12);
            CHECK(rep.mass_residual <= 1e-12);
            CHECK(rep.momentum_residual <= 1e-12);
            CHECK(rep.bernoulli_residual <= 1e-12);
            CHECK(rep.field_residual == 0.0);

            // Entropy-map consistency against the jump algebra.
            const double kappa0 = up.p / std::pow(up.rho, g);
            CHECK(rel_err(j.kappa_s, shock_entropy_ratio(m2, gas).value * kappa0) <= 1e-12);
        }
    }
}

TEST_CASE("raw jump is the identity at the sonic point") {
    const double g = 1.4, rho = 1.2, p = 0.9;
    const FlowState sonic{rho, std::sqrt(g * p / rho), p, 2.0};
    const double k = critical_speed_squared(sonic, {g, 1.0});
    CHECK(k == doctest::Approx(sonic.u * sonic.u).epsilon(1e-14));
    const FlowState same = detail::rankine_hugoniot_state(sonic, k);
    CHECK(same.rho == doctest::Approx(rho).epsilon(1e-14));
    CHECK(same.u == doctest::Approx(sonic.u).epsilon(1e-14));
    CHECK(same.p == doctest::Approx(p).epsilon(1e-13));
}

TEST_CASE("apply_jump rejects sonic and subsonic upstream states") {
    const double g = 1.4;
    CHECK_THROWS_AS(apply_jump(supersonic_state(1.0 + 1e-10, g, 1.0, 1.0), 0.1, air, geom),
                    SolveError);
    CHECK_THROWS_AS(apply_jump(supersonic_state(0.8, g, 1.0, 1.0), 0.1, air, geom), SolveError);
    CHECK_THROWS_AS(apply_jump(supersonic_state(4.0, g, 1.0, 1.0), 0.6, air, geom),
                    FormulaDomainError);  // t_s beyond the span
}

TEST_CASE("admissibility flags a reversed jump and a sonic identity") {
    const FlowState up{1.0, 2.0, 1.0 / 1.4, 3.0};
    const JumpRecord j = apply_jump(up, 0.2, air, geom);

    // Swap the sides: an expansion jump must fail the entropy condition.
    JumpRecord reversed = j;
    std::swap(reversed.upstream, reversed.downstream);
    std::swap(reversed.mach2_minus, reversed.mach2_plus);
    reversed.kappa_s = reversed.downstream.p / std::pow(reversed.downstream.rho, air.gamma);
    const AdmissibilityReport rep = check_admissibility(reversed, air);
    CHECK(!rep.entropy_increases);
    CHECK(!rep.admissible);

    // An identity record at M = 1 is not transonic.
    const double g = 1.4, rho = 1.2, p = 0.9;
    const FlowState sonic{rho, std::sqrt(g * p / rho), p, 2.0};
    JumpRecord ident;
    ident.t_s = 0.1;
    ident.upstream = ident.downstream = sonic;
    ident.kappa_s = p / std::pow(rho, g);
    ident.k_minus = critical_speed_squared(sonic, air);
    ident.mach2_minus = ident.mach2_plus = 1.0;
    CHECK(!check_admissibility(ident, air).transonic);
}

TEST_CASE("shock entropy ratio: fixed point, derivative, monotonicity") {
    for (double g : {1.2, 1.4, 2.0, 3.0}) {
        const EntropyRatio f1 = shock_entropy_ratio(1.0, {g, 1.0});
        CHECK(std::abs(f1.value - 1.0) <= 1e-14);
        CHECK(std::abs(f1.derivative) <= 1e-14);
    }

    // Central finite difference of the value reproduces the derivative.
    const GasLaw gas{1.4, 1.0};
    for (int k = 0; k <= 40; ++k) {
        const double x = std::exp(std::log(1.01) + (std::log(100.0) - std::log(1.01)) * k / 40.0);
        const double h = 1e-5 * x;
        const double fd = (shock_entropy_ratio(x + h, gas).value -
                           shock_entropy_ratio(x - h, gas).value) /
                          (2.0 * h);
        const EntropyRatio f = shock_entropy_ratio(x, gas);
        CHECK(rel_err(f.derivative, fd) <= 1e-6);
        CHECK(f.value > 1.0);
        CHECK(f.derivative > 0.0);
    }

    CHECK_THROWS_AS(shock_entropy_ratio(0.0, gas), FormulaDomainError);
    CHECK_THROWS_AS(shock_entropy_ratio(-1.0, gas), FormulaDomainError);
}

TEST_CASE("random supersonic states satisfy every jump invariant") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const double g = 1.1 + 2.4 * u01(rng);
        const GasLaw gas{g, 1.0};
        const double m2 = 1.05 + 30.0 * u01(rng);
        const FlowState up =
            supersonic_state(m2, g, 0.3 + 2.0 * u01(rng), 0.2 + 3.0 * u01(rng), u01(rng) * 5.0);
        const JumpRecord j = apply_jump(up, 0.45 * u01(rng), gas, geom);
        const AdmissibilityReport rep = check_admissibility(j, gas);
        CHECK(rep.admissible);
        CHECK(rep.mass_residual <= 1e-12);
        CHECK(rep.momentum_residual <= 1e-12);
        CHECK(rep.bernoulli_residual <= 1e-12);
        CHECK(j.kappa_s > up.p / std::pow(up.rho, g));
    }
}
