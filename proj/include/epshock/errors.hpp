#ifndef EPSHOCK_ERRORS_HPP
#define EPSHOCK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace epshock {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid argument to a closed-form formula (nonpositive density, M^2 <= 0, ...).
struct FormulaDomainError : Error {
    using Error::Error;
};

// A formula was evaluated inside the sonic guard band |M^2 - 1| < guard.
struct SonicDegeneracyError : Error {
    using Error::Error;
};

// Problem configuration violates an invariant (exit code 4 at the CLI).
struct ConfigError : Error {
    using Error::Error;
};

// An upstream/downstream solve stopped before its requested span.
struct SolveError : Error {
    enum class Kind { upstream_sonic, downstream_stopped, non_transonic, step_failure };
    Kind kind;
    std::string guard;  // guard that fired, when applicable
    double t_fail;      // nozzle coordinate where integration stopped

    SolveError(Kind k, const std::string& what, std::string guard_name, double t)
        : Error(what), kind(k), guard(std::move(guard_name)), t_fail(t) {}
};

// Requested exit pressure lies outside the computed map range (exit code 3).
struct OutOfRangeError : Error {
    double p_ex, p_min, p_max;
    OutOfRangeError(const std::string& what, double pex, double pmin, double pmax)
        : Error(what), p_ex(pex), p_min(pmin), p_max(pmax) {}
};

// The exit-pressure map is not monotone and --force was not given (exit code 5).
struct NonMonotoneMapError : Error {
    using Error::Error;
};

}  // namespace epshock

#endif
