#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace kg::cli {

enum class RunMode { Td, Bgp, Ktransform, Kpp, Analytic, Sweep };

/// Fully resolved run request: mode, merged key-value config (file < flags),
/// output directory.
struct RunSpec {
    RunMode mode;
    std::map<std::string, std::string> keys;
    std::string out_dir;
};

RunMode parse_mode(const std::string& word);
std::string mode_name(RunMode mode);

/// Reads `key = value` lines from `config_path` (empty = none), then applies
/// `overrides` ("key=value"). Unknown keys and invariant violations raise
/// std::invalid_argument; validation lists every violated field at once.
RunSpec parse_config(RunMode mode, const std::string& config_path,
                     std::span<const std::string> overrides, const std::string& out_dir);

/// Runs the selected solver and writes profiles/series CSVs plus report.json
/// under spec.out_dir. Returns the process exit code: 0 success (degenerate
/// findings included), 2 non-convergence, 3 validation error.
int execute(const RunSpec& spec);

/// argv-level entry used by the binary: <mode> --config <path> --out <dir> [--key=value...]
int run_main(std::span<const std::string> args);

} // namespace kg::cli
