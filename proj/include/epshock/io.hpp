#ifndef EPSHOCK_IO_HPP
#define EPSHOCK_IO_HPP

#include <string>

#include <json.hpp>

#include "epshock/matcher.hpp"

namespace epshock {

using Json = nlohmann::ordered_json;

// Flat key-value JSON config. Required keys: gamma, r0, r1, rho0, u0, p0, E0
// and exactly one of b.constant / b.table. Optional: p_ex, rtol, atol,
// sonic_guard, tol_ts, fd_step, max_steps, n_grid, diag_grid, pineq_samples,
// seed. Unknown keys are rejected.
ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::string& path);

// Emits every resolved field under the same flat keys; parse(echo(c)) == c.
Json echo_config(const ProblemConfig& config);

// Profile CSV with columns t, r, rho, u, p, E, M2, kappa, B, branch and
// numeric fields printed with 17 significant digits.
std::string profile_csv(const SolutionProfile& profile, const GasLaw& gas,
                        const Geometry& geom);

// Sweep CSV with columns t_s, p_exit, f_s, g_s, min_field_excess; rows that
// failed to solve carry nan values.
std::string sweep_csv(const ExitPressureMap& map);

Json certificates_json(const Certificates& c);
Json identities_json(const IdentityReport& r);
Json map_summary_json(const ExitPressureMap& map);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace epshock

#endif
