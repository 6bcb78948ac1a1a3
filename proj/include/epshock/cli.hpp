#ifndef EPSHOCK_CLI_HPP
#define EPSHOCK_CLI_HPP

#include <string>

namespace epshock::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_guard = 2;         // sonic / choking / degeneracy
inline constexpr int exit_out_of_range = 3;  // p_ex outside the map range
inline constexpr int exit_bad_config = 4;    // invalid config or arguments
inline constexpr int exit_unsound = 5;       // non-monotone map without --force

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    bool force = false;
};

int cmd_forward(const Options& opts, double t_s);
int cmd_solve(const Options& opts);
int cmd_sweep(const Options& opts, int n_grid);
int cmd_diagnose(const Options& opts);

// Sweep parallelism cap from EPSHOCK_THREADS (0 = all cores).
unsigned threads_from_env();

int run(int argc, char** argv);

}  // namespace epshock::cli

#endif
