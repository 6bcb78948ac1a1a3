#ifndef EPSHOCK_IVP_HPP
#define EPSHOCK_IVP_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epshock/errors.hpp"

namespace epshock::ivp {

using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
using GuardFn = std::function<double(double t, std::span<const double> y)>;

enum class GuardKind { hard_stop, warning };

// A guard watches a scalar test function along the solution. Its admissible
// sign is the sign at the initial point; the guard fires when the value
// crosses zero away from that sign at an accepted step. The crossing is then
// localized by bisection on the dense interpolant.
struct GuardPredicate {
    std::string name;
    GuardFn test;
    GuardKind kind = GuardKind::hard_stop;
};

struct ToleranceConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 1000000;
};

struct IvpProblem {
    int dimension = 0;
    RhsFn rhs;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<double> y_start;
    std::vector<GuardPredicate> guards;
};

enum class IntegrationStatus { completed, guard_fired, step_failure };

struct GuardStop {
    std::string name;
    double t_stop;
};

struct StepStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
};

class Trajectory {
  public:
    IntegrationStatus status = IntegrationStatus::completed;
    std::optional<GuardStop> guard;   // set when status == guard_fired
    std::vector<GuardStop> warnings;  // warning-kind guard crossings
    std::string failure_reason;       // set when status == step_failure
    StepStats stats;

    int dimension() const { return dim_; }
    std::size_t size() const { return times_.size(); }
    double time(std::size_t i) const { return times_[i]; }
    std::span<const double> state(std::size_t i) const {
        return {states_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    const std::vector<double>& times() const { return times_; }
    double t_begin() const { return times_.front(); }
    double t_reached() const { return times_.back(); }

    // Interpolated state; throws FormulaDomainError outside the reached span.
    std::vector<double> dense_eval(double t) const;
    void dense_eval(double t, std::span<double> out) const;

    static Trajectory single_point(double t, std::span<const double> y);

  private:
    friend Trajectory integrate(const IvpProblem&, const ToleranceConfig&);

    struct DenseStep {
        double t0, h;
        std::vector<double> rc;  // 5 * dim interpolation coefficients
    };

    int dim_ = 0;
    std::vector<double> times_;
    std::vector<double> states_;
    std::vector<DenseStep> dense_;

    void push_sample(double t, std::span<const double> y);
    void eval_step(const DenseStep& s, double t, std::span<double> out) const;
};

Trajectory integrate(const IvpProblem& problem, const ToleranceConfig& tol);

}  // namespace epshock::ivp

#endif
