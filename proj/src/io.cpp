#include "epshock/io.hpp"

#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace epshock {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double require_number(const Json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config: missing required key '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError("config: key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

double optional_number(const Json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError("config: key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

long optional_integer(const Json& j, const std::string& key, long fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        throw ConfigError("config: key '" + key + "' must be an integer");
    return j.at(key).get<long>();
}

const std::set<std::string> known_keys = {
    "gamma", "r0", "r1", "rho0", "u0", "p0", "E0", "b.constant", "b.table",
    "p_ex", "rtol", "atol", "sonic_guard", "tol_ts", "fd_step", "max_steps",
    "n_grid", "diag_grid", "pineq_samples", "seed"};

}  // namespace

ProblemConfig parse_config(const std::string& json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (const auto& item : j.items())
        if (!known_keys.count(item.key()))
            throw ConfigError("config: unknown key '" + item.key() + "'");

    ProblemConfig c;
    c.gamma = require_number(j, "gamma");
    c.r0 = require_number(j, "r0");
    c.r1 = require_number(j, "r1");
    c.rho0 = require_number(j, "rho0");
    c.u0 = require_number(j, "u0");
    c.p0 = require_number(j, "p0");
    c.E0 = require_number(j, "E0");

    const bool has_const = j.contains("b.constant");
    const bool has_table = j.contains("b.table");
    if (has_const == has_table)
        throw ConfigError("config: exactly one of b.constant / b.table is required");
    if (has_const) {
        c.b = BackgroundCharge::constant(require_number(j, "b.constant"));
    } else {
        const Json& tbl = j.at("b.table");
        if (!tbl.is_array() || tbl.empty())
            throw ConfigError("config: b.table must be a non-empty array of [t, b] pairs");
        std::vector<std::pair<double, double>> knots;
        knots.reserve(tbl.size());
        for (const auto& row : tbl) {
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
                !row[1].is_number())
                throw ConfigError("config: each b.table entry must be a [t, b] number pair");
            knots.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        c.b = BackgroundCharge::table(std::move(knots));
    }

    if (j.contains("p_ex")) c.p_ex = require_number(j, "p_ex");
    c.tol.rtol = optional_number(j, "rtol", c.tol.rtol);
    c.tol.atol = optional_number(j, "atol", c.tol.atol);
    c.tol.sonic_guard = optional_number(j, "sonic_guard", c.tol.sonic_guard);
    c.tol.tol_ts = optional_number(j, "tol_ts", c.tol.tol_ts);
    c.tol.fd_step = optional_number(j, "fd_step", c.tol.fd_step);
    c.tol.max_steps = optional_integer(j, "max_steps", c.tol.max_steps);
    c.n_grid = static_cast<int>(optional_integer(j, "n_grid", c.n_grid));
    c.diag_grid = static_cast<int>(optional_integer(j, "diag_grid", c.diag_grid));
    c.pineq_samples = static_cast<int>(optional_integer(j, "pineq_samples", c.pineq_samples));
    c.seed = static_cast<unsigned long>(
        optional_integer(j, "seed", static_cast<long>(c.seed)));

    c.validate();
    return c;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

Json echo_config(const ProblemConfig& c) {
    Json j;
    j["gamma"] = c.gamma;
    j["r0"] = c.r0;
    j["r1"] = c.r1;
    j["rho0"] = c.rho0;
    j["u0"] = c.u0;
    j["p0"] = c.p0;
    j["E0"] = c.E0;
    if (c.b.is_constant()) {
        j["b.constant"] = c.b.constant_value();
    } else {
        Json tbl = Json::array();
        for (const auto& [t, bv] : c.b.knots()) tbl.push_back(Json::array({t, bv}));
        j["b.table"] = tbl;
    }
    if (c.p_ex) j["p_ex"] = *c.p_ex;
    j["rtol"] = c.tol.rtol;
    j["atol"] = c.tol.atol;
    j["sonic_guard"] = c.tol.sonic_guard;
    j["tol_ts"] = c.tol.tol_ts;
    j["fd_step"] = c.tol.fd_step;
    j["max_steps"] = c.tol.max_steps;
    j["n_grid"] = c.n_grid;
    j["diag_grid"] = c.diag_grid;
    j["pineq_samples"] = c.pineq_samples;
    j["seed"] = c.seed;
    return j;
}

std::string profile_csv(const SolutionProfile& profile, const GasLaw& gas,
                        const Geometry& geom) {
    std::string out = "t,r,rho,u,p,E,M2,kappa,B,branch\n";
    const char* branch = profile.branch == Branch::supersonic ? "supersonic" : "subsonic";
    for (const auto& s : profile.samples) {
        out += g17(s.t);
        out += ',';
        out += g17(geom.radius(s.t));
        out += ',';
        out += g17(s.state.rho);
        out += ',';
        out += g17(s.state.u);
        out += ',';
        out += g17(s.state.p);
        out += ',';
        out += g17(s.state.E);
        out += ',';
        out += g17(s.mach2);
        out += ',';
        out += g17(profile.inv.kappa);
        out += ',';
        out += g17(bernoulli(s.state, gas));
        out += ',';
        out += branch;
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const ExitPressureMap& map) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::string out = "t_s,p_exit,f_s,g_s,min_field_excess\n";
    for (const auto& pt : map.grid) {
        out += g17(pt.t_s);
        out += ',';
        out += g17(pt.ok ? pt.p_exit : nan);
        out += ',';
        out += g17(pt.ok ? pt.certificates.f_s_value : nan);
        out += ',';
        out += g17(pt.ok ? pt.certificates.g_s_value : nan);
        out += ',';
        out += g17(pt.ok ? pt.certificates.min_field_excess : nan);
        out += '\n';
    }
    return out;
}

Json certificates_json(const Certificates& c) {
    Json j;
    j["delta0"] = c.delta0;
    j["beta1"] = c.beta1;
    j["b0"] = c.b0;
    j["min_field_excess"] = c.min_field_excess;
    j["mach_monotone"] = c.mach_monotone;
    j["mach_violation"] = c.mach_violation;
    j["f_s"] = c.f_s_value;
    j["g_s"] = c.g_s_value;
    if (c.downstream_checked) j["density_monotone"] = c.density_monotone;
    j["certified"] = c.certified();
    return j;
}

Json identities_json(const IdentityReport& r) {
    Json j;
    j["bernoulli_form_residual"] = r.bernoulli_form_residual;
    j["field_integral_residual_down"] = r.field_integral_residual_down;
    j["field_integral_residual_up"] = r.field_integral_residual_up;
    j["g_p"] = r.g_p;
    j["exit_subsonic"] = r.exit_subsonic;
    return j;
}

Json map_summary_json(const ExitPressureMap& map) {
    Json j;
    j["points"] = map.grid.size();
    j["complete"] = map.complete;
    j["monotone_decreasing"] = map.monotone_decreasing;
    j["max_inversion_rel"] = map.max_inversion_rel;
    j["certified"] = map.certified;
    j["p_min"] = map.p_min;
    j["p_max"] = map.p_max;
    Json failures = Json::array();
    for (const auto& pt : map.grid) {
        if (pt.ok) continue;
        failures.push_back(Json{{"t_s", pt.t_s}, {"error", pt.error}});
    }
    j["failures"] = failures;
    return j;
}

void write_text_file(const std::string& path, const std::string& contents) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace epshock
