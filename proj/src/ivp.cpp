#include "epshock/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epshock::ivp {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Step-size controller constants (Hairer's defaults for dopri5).
constexpr double safe = 0.9;
constexpr double fac1 = 0.2;   // max step decrease factor
constexpr double fac2 = 10.0;  // max step increase factor
constexpr double ctrl_beta = 0.04;
constexpr double expo1 = 0.2 - ctrl_beta * 0.75;

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

void Trajectory::push_sample(double t, std::span<const double> y) {
    times_.push_back(t);
    states_.insert(states_.end(), y.begin(), y.end());
}

Trajectory Trajectory::single_point(double t, std::span<const double> y) {
    Trajectory traj;
    traj.dim_ = static_cast<int>(y.size());
    traj.push_sample(t, y);
    return traj;
}

void Trajectory::eval_step(const DenseStep& s, double t, std::span<double> out) const {
    const double theta = (t - s.t0) / s.h;
    const double theta1 = 1.0 - theta;
    const double* rc = s.rc.data();
    for (int i = 0; i < dim_; ++i) {
        out[i] = rc[i] +
                 theta * (rc[dim_ + i] +
                          theta1 * (rc[2 * dim_ + i] +
                                    theta * (rc[3 * dim_ + i] + theta1 * rc[4 * dim_ + i])));
    }
}

void Trajectory::dense_eval(double t, std::span<double> out) const {
    if (times_.empty() || t < times_.front() || t > times_.back())
        throw FormulaDomainError("dense_eval: t outside the integrated span");
    // Exact node hits return the stored sample.
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it != times_.end() && *it == t) {
        auto s = state(static_cast<std::size_t>(it - times_.begin()));
        std::copy(s.begin(), s.end(), out.begin());
        return;
    }
    const std::size_t step = static_cast<std::size_t>(it - times_.begin()) - 1;
    eval_step(dense_[step], t, out);
}

std::vector<double> Trajectory::dense_eval(double t) const {
    std::vector<double> out(static_cast<std::size_t>(dim_));
    dense_eval(t, out);
    return out;
}

Trajectory integrate(const IvpProblem& problem, const ToleranceConfig& tol) {
    const int n = problem.dimension;
    if (n < 1) throw FormulaDomainError("integrate: dimension must be >= 1");
    if (!(problem.t_end > problem.t_start))
        throw FormulaDomainError("integrate: t_end must exceed t_start");
    if (static_cast<int>(problem.y_start.size()) != n)
        throw FormulaDomainError("integrate: y_start size mismatch");
    if (!all_finite(problem.y_start))
        throw FormulaDomainError("integrate: y_start must be finite");
    if (!(tol.rtol > 0.0 && tol.rtol <= 1e-3 && tol.atol > 0.0))
        throw FormulaDomainError("integrate: rtol in (0, 1e-3] and atol > 0 required");

    const double span = problem.t_end - problem.t_start;
    const double hmax = span;
    const double uround = std::numeric_limits<double>::epsilon();

    Trajectory traj;
    traj.dim_ = n;

    std::vector<double> y(problem.y_start);
    std::vector<double> ynew(n), ystage(n), yerr(n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

    auto rhs = [&](double t, std::span<const double> yy, std::span<double> out) {
        problem.rhs(t, yy, out);
        ++traj.stats.rhs_evaluations;
    };

    double t = problem.t_start;
    traj.push_sample(t, y);

    // Guard admissible signs at the initial point; a zero fires immediately.
    std::vector<int> guard_sign(problem.guards.size(), 0);
    std::vector<char> warned(problem.guards.size(), 0);
    for (std::size_t gi = 0; gi < problem.guards.size(); ++gi) {
        const double g0 = problem.guards[gi].test(t, y);
        guard_sign[gi] = sign_of(g0);
        if (guard_sign[gi] == 0) {
            if (problem.guards[gi].kind == GuardKind::hard_stop) {
                traj.status = IntegrationStatus::guard_fired;
                traj.guard = GuardStop{problem.guards[gi].name, t};
                return traj;
            }
            traj.warnings.push_back({problem.guards[gi].name, t});
            warned[gi] = 1;
        }
    }

    rhs(t, y, k1);

    // Initial step size (Hairer's hinit, specialized to forward integration).
    double h;
    {
        double dnf = 0.0, dny = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sk = tol.atol + tol.rtol * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        h = std::min(h, hmax);
        for (int i = 0; i < n; ++i) ystage[i] = y[i] + h * k1[i];
        rhs(t + h, ystage, k2);
        double der2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sk = tol.atol + tol.rtol * std::abs(y[i]);
            der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = (der12 <= 1e-15) ? std::max(1e-6, std::abs(h) * 1e-3)
                                           : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h, h1, hmax});
        if (!std::isfinite(h) || h <= 0.0) h = 1e-6 * span;
    }

    double facold = 1e-4;
    bool rejected_last = false;
    long nstep = 0;
    bool last = false;

    while (true) {
        if (nstep >= tol.max_steps) {
            traj.status = IntegrationStatus::step_failure;
            traj.failure_reason = "maximum step count exceeded";
            return traj;
        }
        if (0.1 * std::abs(h) <= std::abs(t) * uround) {
            traj.status = IntegrationStatus::step_failure;
            traj.failure_reason = "step size underflow";
            return traj;
        }
        if (t + 1.01 * h - problem.t_end > 0.0) {
            h = problem.t_end - t;
            last = true;
        }
        ++nstep;

        // The six intermediate stages; k1 carries f(t, y) (FSAL).
        for (int i = 0; i < n; ++i) ystage[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ystage, k2);
        for (int i = 0; i < n; ++i) ystage[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ystage, k3);
        for (int i = 0; i < n; ++i)
            ystage[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ystage, k4);
        for (int i = 0; i < n; ++i)
            ystage[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ystage, k5);
        for (int i = 0; i < n; ++i)
            ystage[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                    a65 * k5[i]);
        rhs(t + h, ystage, k6);
        for (int i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                  a76 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
            const double sk = tol.atol + tol.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sk) * (yerr[i] / sk);
        }
        err = std::sqrt(err / n);
        if (!std::isfinite(err) || !all_finite(ynew)) err = 1e10;

        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            // Accepted: store the step and its dense-output coefficients.
            facold = std::max(err, 1e-4);

            Trajectory::DenseStep ds;
            ds.t0 = t;
            ds.h = h;
            ds.rc.resize(static_cast<std::size_t>(5 * n));
            for (int i = 0; i < n; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                ds.rc[i] = y[i];
                ds.rc[n + i] = ydiff;
                ds.rc[2 * n + i] = bspl;
                ds.rc[3 * n + i] = ydiff - h * k7[i] - bspl;
                ds.rc[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                        d6 * k6[i] + d7 * k7[i]);
            }
            traj.dense_.push_back(std::move(ds));

            const double t_prev = t;
            t = last ? problem.t_end : t + h;
            traj.push_sample(t, ynew);
            ++traj.stats.accepted;

            // Guard checks on the accepted point, localized on the interpolant.
            for (std::size_t gi = 0; gi < problem.guards.size(); ++gi) {
                const auto& gp = problem.guards[gi];
                if (gp.kind == GuardKind::warning && warned[gi]) continue;
                const double gv = gp.test(t, ynew);
                if (sign_of(gv) == guard_sign[gi] && gv != 0.0) continue;

                // Bisect [t_prev, t] for the first departure from the admissible sign.
                double lo = t_prev, hi = t;
                std::vector<double> ymid(static_cast<std::size_t>(n));
                const double locate_tol = 1e-12 * span;
                while (hi - lo > locate_tol) {
                    const double mid = 0.5 * (lo + hi);
                    traj.eval_step(traj.dense_.back(), mid, ymid);
                    const double gm = gp.test(mid, ymid);
                    if (sign_of(gm) == guard_sign[gi] && gm != 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                if (gp.kind == GuardKind::warning) {
                    traj.warnings.push_back({gp.name, hi});
                    warned[gi] = 1;
                    continue;
                }
                // Truncate the trajectory at the crossing.
                traj.eval_step(traj.dense_.back(), hi, ymid);
                traj.times_.back() = hi;
                std::copy(ymid.begin(), ymid.end(),
                          traj.states_.end() - n);
                traj.status = IntegrationStatus::guard_fired;
                traj.guard = GuardStop{gp.name, hi};
                return traj;
            }

            if (last) {
                traj.status = IntegrationStatus::completed;
                return traj;
            }

            std::swap(y, ynew);
            std::swap(k1, k7);

            double fac = fac11 / std::pow(facold, ctrl_beta);
            fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac / safe));
            double hnew = h / fac;
            if (rejected_last) hnew = std::min(hnew, h);
            h = std::min(hnew, hmax);
            rejected_last = false;
        } else {
            ++traj.stats.rejected;
            rejected_last = true;
            last = false;
            h = h / std::min(1.0 / fac1, fac11 / safe);
        }
    }
}

}  // namespace epshock::ivp
