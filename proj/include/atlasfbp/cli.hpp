#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atlasfbp/io.hpp"

namespace atlas {

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_invalid = 2, exit_numerical = 3 };

struct CliOptions {
    std::filesystem::path config;  // empty: command defaults (props only)
    std::filesystem::path out = ".";
    std::optional<std::uint64_t> seed;
    int jobs = 0;  // 0 leaves the OpenMP default
};

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string version;
    Json resolved_config;
    std::vector<std::string> outputs;  // relative to the output directory

    /// Lists every output with its content digest.
    Json to_json(const std::filesystem::path& out_dir) const;
};

std::string artifact_version();

// Each command returns an ExitCode and writes its outputs plus manifest.json
// under opt.out. Exceptions are mapped to codes by run_cli only.
int cmd_solve(const CliOptions& opt, std::ostream& log);
int cmd_simulate(const CliOptions& opt, std::ostream& log);
int cmd_verify(const CliOptions& opt, std::ostream& log);
int cmd_props(const CliOptions& opt, std::ostream& log);

/// Parse argv, dispatch, and translate library errors into exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace atlas
