#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>

#include "epshock/cli.hpp"
#include "epshock/io.hpp"
#include "test_support.hpp"

using namespace epshock;
namespace fs = std::filesystem;

namespace {

const char* cli = EPSHOCK_CLI_PATH;

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() /
                   ("epshock_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    REQUIRE(WIFEXITED(raw));
    return WEXITSTATUS(raw);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path write_config(const fs::path& dir, double E0, const char* extra = "") {
    const fs::path p = dir / "config.json";
    std::ofstream out(p);
    out << "{\n"
           "  \"gamma\": 1.4, \"r0\": 1.0, \"r1\": 0.5,\n"
           "  \"rho0\": 1.0, \"u0\": 2.0, \"p0\": 0.7142857142857143,\n"
           "  \"E0\": "
        << E0 << ",\n  \"b.constant\": 1.0" << extra << "\n}\n";
    return p;
}

}  // namespace

TEST_CASE("config parse / echo round trip is the identity") {
    const std::string text =
        "{\"gamma\": 1.4, \"r0\": 1.0, \"r1\": 0.5, \"rho0\": 1.0, \"u0\": 2.0,"
        " \"p0\": 0.7142857142857143, \"E0\": 10.0,"
        " \"b.table\": [[0.0, 1.0], [0.25, 1.1], [0.5, 0.9]],"
        " \"p_ex\": 20.0, \"rtol\": 1e-9, \"n_grid\": 11, \"seed\": 3}";
    const ProblemConfig a = parse_config(text);
    const ProblemConfig b = parse_config(echo_config(a).dump());
    CHECK(echo_config(a) == echo_config(b));
    CHECK(b.b.knots().size() == 3);
    CHECK(*b.p_ex == 20.0);
    CHECK(b.tol.rtol == 1e-9);
    CHECK(b.seed == 3);
}

TEST_CASE("config rejection paths") {
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1,2,3]"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"gamma\": 1.4}"), ConfigError);  // missing keys
    CHECK_THROWS_AS(
        parse_config("{\"gamma\": 1.4, \"r0\": 1, \"r1\": 0.5, \"rho0\": 1, \"u0\": 2,"
                     " \"p0\": 0.714, \"E0\": 1, \"b.constant\": 1, \"bogus\": 7}"),
        ConfigError);  // unknown key
    CHECK_THROWS_AS(
        parse_config("{\"gamma\": 1.4, \"r0\": 1, \"r1\": 0.5, \"rho0\": 1, \"u0\": 2,"
                     " \"p0\": 0.714, \"E0\": 1, \"b.constant\": 1,"
                     " \"b.table\": [[0, 1]]}"),
        ConfigError);  // both charge forms
    CHECK_THROWS_AS(
        parse_config("{\"gamma\": 1.4, \"r0\": 0.5, \"r1\": 1.0, \"rho0\": 1, \"u0\": 2,"
                     " \"p0\": 0.714, \"E0\": 1, \"b.constant\": 1}"),
        ConfigError);  // inverted radii
    CHECK_THROWS_AS(
        parse_config("{\"gamma\": 1.4, \"r0\": 1, \"r1\": 0.5, \"rho0\": 1, \"u0\": 0.1,"
                     " \"p0\": 0.714, \"E0\": 1, \"b.constant\": 1}"),
        ConfigError);  // subsonic entrance
}

TEST_CASE("forward: success, outputs, and CSV shape") {
    const fs::path dir = fresh_dir("forward");
    const fs::path cfg = write_config(dir, 10.0);
    CHECK(run_cli("forward --config " + cfg.string() + " --ts 0.25 --out " + dir.string()) == 0);

    const std::string up = slurp(dir / "upstream.csv");
    const std::string down = slurp(dir / "downstream.csv");
    CHECK(up.rfind("t,r,rho,u,p,E,M2,kappa,B,branch\n", 0) == 0);
    CHECK(down.rfind("t,r,rho,u,p,E,M2,kappa,B,branch\n", 0) == 0);
    CHECK(up.find("supersonic") != std::string::npos);
    CHECK(down.find("subsonic") != std::string::npos);

    // The t column is strictly increasing and the 17-digit kappa column
    // round-trips to the exact double 5/7.
    std::istringstream lines(up);
    std::string line;
    std::getline(lines, line);  // header
    double prev_t = -1.0;
    int rows = 0;
    while (std::getline(lines, line)) {
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        const double t = std::stod(cell);
        CHECK(t > prev_t);
        prev_t = t;
        for (int skip = 0; skip < 7; ++skip) std::getline(row, cell, ',');
        CHECK(std::stod(cell) == 5.0 / 7.0);
        ++rows;
    }
    CHECK(rows >= 2);

    const Json report = Json::parse(slurp(dir / "report.json"));
    CHECK(report["outcome"] == "ok");
    CHECK(report["command"] == "forward");
    CHECK(report["solution"]["certificates"]["certified"] == true);
    CHECK(report["config"]["gamma"] == 1.4);
}

TEST_CASE("forward: invalid shock locations exit 4") {
    const fs::path dir = fresh_dir("forward_bad_ts");
    const fs::path cfg = write_config(dir, 10.0);
    CHECK(run_cli("forward --config " + cfg.string() + " --ts 0.5 --out " + dir.string()) == 4);
    CHECK(run_cli("forward --config " + cfg.string() + " --ts 2.0 --out " + dir.string()) == 4);
    CHECK(run_cli("forward --config " + cfg.string() + " --ts -0.1 --out " + dir.string()) == 4);
}

TEST_CASE("forward: a choking run exits 2 and reports the guard") {
    const fs::path dir = fresh_dir("forward_choke");
    const fs::path cfg = write_config(dir, 0.0);
    CHECK(run_cli("forward --config " + cfg.string() + " --ts 0.25 --out " + dir.string()) == 2);
    const Json report = Json::parse(slurp(dir / "report.json"));
    CHECK(report["outcome"] == "guard");
    CHECK(report["error"]["guard"] == "sonic");
    const double t_fail = report["error"]["t_fail"].get<double>();
    CHECK(t_fail > 0.25);
    CHECK(t_fail < 0.5);
}

TEST_CASE("forward: invalid config exits 4") {
    const fs::path dir = fresh_dir("forward_bad_cfg");
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << "{\"gamma\": 1.4}";
    CHECK(run_cli("forward --config " + cfg.string() + " --ts 0.1 --out " + dir.string()) == 4);
    CHECK(run_cli("forward --config " + (dir / "missing.json").string() + " --ts 0.1") == 4);
}

TEST_CASE("solve: round trip through the CLI") {
    const fs::path dir = fresh_dir("solve");
    // p_ex computed by a forward solve at ts* = 0.25 beforehand, via the library.
    ProblemConfig c = epshock::testing::reference_config(10.0);
    const double p_ex = forward_solve(c, 0.25).exit_pressure;
    char extra[128];
    std::snprintf(extra, sizeof extra, ",\n  \"p_ex\": %.17g", p_ex);
    const fs::path cfg = write_config(dir, 10.0, extra);

    CHECK(run_cli("solve --config " + cfg.string() + " --out " + dir.string()) == 0);
    const Json report = Json::parse(slurp(dir / "report.json"));
    CHECK(report["outcome"] == "ok");
    const double t_s = report["solution"]["t_s"].get<double>();
    CHECK(std::abs(t_s - 0.25) <= 1e-8 * 0.5);
    CHECK(report["pressure_residual_rel"].get<double>() <= 1e-6);
    CHECK(fs::exists(dir / "upstream.csv"));
    CHECK(fs::exists(dir / "downstream.csv"));
}

TEST_CASE("solve: out-of-range pressure exits 3 with the range in the report") {
    const fs::path dir = fresh_dir("solve_range");
    const fs::path cfg = write_config(dir, 10.0, ",\n  \"p_ex\": 1e6");
    CHECK(run_cli("solve --config " + cfg.string() + " --out " + dir.string()) == 3);
    const Json report = Json::parse(slurp(dir / "report.json"));
    CHECK(report["outcome"] == "out-of-range");
    CHECK(report["error"]["range"].size() == 2);
    CHECK(report["error"]["range"][0].get<double>() > 0.0);
}

TEST_CASE("solve: missing p_ex exits 4") {
    const fs::path dir = fresh_dir("solve_nopex");
    const fs::path cfg = write_config(dir, 10.0);
    CHECK(run_cli("solve --config " + cfg.string() + " --out " + dir.string()) == 4);
}

TEST_CASE("solve: force on an uncertified map warns and succeeds") {
    const fs::path dir = fresh_dir("solve_force");
    ProblemConfig c = epshock::testing::reference_config(2.0);
    const double p_ex = forward_solve(c, 0.2).exit_pressure;
    char extra[128];
    std::snprintf(extra, sizeof extra, ",\n  \"p_ex\": %.17g", p_ex);
    const fs::path cfg = write_config(dir, 2.0, extra);

    CHECK(run_cli("solve --config " + cfg.string() + " --force --out " + dir.string()) == 0);
    const Json report = Json::parse(slurp(dir / "report.json"));
    CHECK(report["map"]["certified"] == false);
    CHECK(report.contains("warnings"));
}

TEST_CASE("solve: a non-monotone uncertified map exits 5 without --force") {
    const fs::path dir = fresh_dir("solve_unsound");
    // E0 = 1 produces a complete but non-monotone exit-pressure map.
    ProblemConfig c = epshock::testing::reference_config(1.0);
    const ExitPressureMap map = exit_pressure_map(c, c.n_grid);
    const double p_ex = 0.5 * (map.p_min + map.p_max);
    char extra[128];
    std::snprintf(extra, sizeof extra, ",\n  \"p_ex\": %.17g", p_ex);
    const fs::path cfg = write_config(dir, 1.0, extra);

    CHECK(run_cli("solve --config " + cfg.string() + " --out " + dir.string()) == 5);
    const Json refused = Json::parse(slurp(dir / "report.json"));
    CHECK(refused["outcome"] == "unsound");
    CHECK(refused["map"]["monotone_decreasing"] == false);

    CHECK(run_cli("solve --config " + cfg.string() + " --force --out " + dir.string()) == 0);
    const Json forced = Json::parse(slurp(dir / "report.json"));
    CHECK(forced["outcome"] == "ok");
    CHECK(forced.contains("warnings"));
}

TEST_CASE("sweep: grid size, monotone flag, refinement") {
    const fs::path dir = fresh_dir("sweep");
    const fs::path cfg = write_config(dir, 10.0);
    CHECK(run_cli("sweep --config " + cfg.string() + " --grid 2 --out " + dir.string()) == 0);
    std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("t_s,p_exit,f_s,g_s,min_field_excess\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows

    const Json r2 = Json::parse(slurp(dir / "report.json"));
    CHECK(r2["map"]["monotone_decreasing"] == true);

    CHECK(run_cli("sweep --config " + cfg.string() + " --grid 4 --out " + dir.string()) == 0);
    const Json r4 = Json::parse(slurp(dir / "report.json"));
    CHECK(r4["map"]["monotone_decreasing"] == true);
    CHECK(r4["map"]["certified"] == true);
}

TEST_CASE("diagnose: certificates and sensitivity ledger in the report") {
    const fs::path dir = fresh_dir("diag");
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << "{\"gamma\": 2.0, \"r0\": 1.0, \"r1\": 0.7, \"rho0\": 1.0,"
                          " \"u0\": 2.0, \"p0\": 1.0, \"E0\": 10.0, \"b.constant\": 1.0,"
                          " \"diag_grid\": 5}";
    CHECK(run_cli("diagnose --config " + cfg.string() + " --out " + dir.string()) == 0);
    const Json report = Json::parse(slurp(dir / "report.json"));
    CHECK(report["delta0"].get<double>() > 0.0);
    CHECK(report["contraction_inequality"]["applicable"] == true);
    CHECK(report["contraction_inequality"]["holds"] == true);
    CHECK(report["upstream"]["min_field_excess"].get<double>() > 0.0);
    CHECK(report["shock_locations"].size() == 5);
    const Json& ledger = report["sensitivity"]["sign_ledger"];
    for (const auto& item : ledger.items()) CHECK(item.value() == true);
}

TEST_CASE("diagnose: zero-field config reports a negative certificate") {
    const fs::path dir = fresh_dir("diag0");
    const fs::path cfg = write_config(dir, 0.0, ",\n  \"diag_grid\": 3");
    CHECK(run_cli("diagnose --config " + cfg.string() + " --out " + dir.string()) == 0);
    const Json report = Json::parse(slurp(dir / "report.json"));
    CHECK(report["upstream"]["min_field_excess"].get<double>() < 0.0);
    CHECK(report["upstream"]["completed"] == false);
}

TEST_CASE("identical configs produce byte-identical CSV outputs") {
    const fs::path d1 = fresh_dir("det1");
    const fs::path d2 = fresh_dir("det2");
    const fs::path cfg = write_config(d1, 10.0);
    CHECK(run_cli("forward --config " + cfg.string() + " --ts 0.31 --out " + d1.string()) == 0);
    CHECK(run_cli("forward --config " + cfg.string() + " --ts 0.31 --out " + d2.string()) == 0);
    CHECK(slurp(d1 / "upstream.csv") == slurp(d2 / "upstream.csv"));
    CHECK(slurp(d1 / "downstream.csv") == slurp(d2 / "downstream.csv"));

    CHECK(run_cli("sweep --config " + cfg.string() + " --grid 7 --out " + d1.string()) == 0);
    CHECK(run_cli("sweep --config " + cfg.string() + " --grid 7 --out " + d2.string()) == 0);
    CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));

    // A thread cap must not change the bytes.
    setenv("EPSHOCK_THREADS", "2", 1);
    CHECK(run_cli("sweep --config " + cfg.string() + " --grid 7 --out " + d2.string()) == 0);
    unsetenv("EPSHOCK_THREADS");
    CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));
}

TEST_CASE("EPSHOCK_THREADS caps are parsed") {
    unsetenv("EPSHOCK_THREADS");
    CHECK(epshock::cli::threads_from_env() == 0);
    setenv("EPSHOCK_THREADS", "2", 1);
    CHECK(epshock::cli::threads_from_env() == 2);
    setenv("EPSHOCK_THREADS", "junk", 1);
    CHECK(epshock::cli::threads_from_env() == 0);
    unsetenv("EPSHOCK_THREADS");
}
