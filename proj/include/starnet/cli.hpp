#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "starnet/config.hpp"

namespace starnet::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidConfig = 2,
  kPhysicsRejection = 3,
  kNumericalFailure = 4,
  kIoFailure = 5,
};

/// Formats a float with 12 significant digits; infinities as `inf`.
std::string format_number(double v);

/// Runs one command, writing its CSV/JSON outputs under `out`. Failures are
/// reported as a single JSON line on `err` and mapped to an exit code.
int run(const config::RunConfig& cfg, std::ostream& err);

}  // namespace starnet::cli
