#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "dbfft/config.hpp"

namespace dbfft {

enum ExitCode : int { kExitConverged = 0, kExitUsage = 1, kExitNotConverged = 2 };

struct RunResult {
  int exit_code = kExitConverged;
  int increments_completed = 0;
  std::vector<std::filesystem::path> files;
};

/// Solves the configured problem and writes the artifacts (VTK snapshots,
/// history CSV, per-solve residual traces) into config.output.directory.
/// Progress lines go to `log`. Artifacts are written even when a solve
/// fails to converge.
RunResult run(const RunConfig& config, std::ostream& log);

/// "%.17g" formatting used in every CSV.
std::string format_number(double v);

}  // namespace dbfft
