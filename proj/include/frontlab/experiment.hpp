#pragma once

#include "frontlab/config.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>

namespace frontlab {

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int usage = 1;
inline constexpr int scientific = 2;
}  // namespace exit_code

/// Files produced by one experiment, keyed by name relative to the output directory.
struct ExperimentArtifacts {
    int status = exit_code::success;
    std::string report;  ///< JSON text
    std::map<std::string, std::string> files;
};

/// Worker count: the config key wins over FRONTLAB_WORKERS; a disagreement is reported on `log`.
int resolve_workers(const RunConfig& config, std::ostream& log);

/// Runs the experiment without touching the filesystem.
ExperimentArtifacts compute_experiment(const RunConfig& config, std::ostream& log);

/// Computes, then writes report.json, the artifact files and manifest.json under `out_dir`.
/// Returns the exit status (0 success, 2 scientific failure, 1 usage error).
int run_experiment(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int run_experiment(const RunConfig& config, std::ostream& log);

std::string sha256_hex(const std::string& data);

}  // namespace frontlab
