#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace caproj {

struct RunOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::string case_text = "III";
    std::optional<double> dt;
    std::optional<double> duration;
};

struct VerifyOptions {
    std::string config_path;
    std::string only;  // empty = all checks
    std::uint64_t seed = 1;
    std::string out_dir;  // when set, also writes verify.txt there
};

struct SweepOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::string case_text = "III";
    std::vector<std::string> grid;  // "param=v1,v2,..." entries
    std::optional<double> dt;
    std::optional<double> duration;
};

/// Runs one scenario and writes trajectory.csv and metrics.txt under the
/// output directory. Returns 0 on success, 2 on configuration errors, 3 on
/// an integration fault.
int cmd_run(const RunOptions& options);

/// Runs the lemma checks and prints one line per check. Returns 0 when all
/// pass, 1 on any failure, 2 on configuration errors.
int cmd_verify(const VerifyOptions& options);

/// Runs a scenario per grid point (cross product of the parameter lists)
/// and writes one metrics row per point to sweep.csv. Returns 0 when every
/// row succeeded, 1 otherwise, 2 on configuration errors.
int cmd_sweep(const SweepOptions& options);

}  // namespace caproj
