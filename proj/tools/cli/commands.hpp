#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace topoloc::cli {

enum ExitCode : int { kSuccess = 0, kInvariantFailure = 1, kConfigError = 2 };

std::string tool_version();

/// Per-g bound table (CSV) and run metadata (JSON).
int cmd_sweep(const ExperimentConfig& config, std::ostream& log);
/// Trajectory table (CSV) and collapse-time summary (JSON).
int cmd_dynamics(const ExperimentConfig& config, std::ostream& log);
/// Per-N peak table (CSV) and scaling fit (JSON).
int cmd_scaling(const ExperimentConfig& config, std::ostream& log);

struct ValidateOptions {
  /// Replaces a witness generator of the 2x2 L^x_h fixture by a dependent one.
  bool inject_fault = false;
  /// Adds the continuous LE optimizer to the hierarchy suite.
  bool full = false;
  std::size_t workers = 0;
  std::string report_path;  // JSON report when non-empty
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string detail;
  double seconds = 0.0;
};

std::vector<SuiteResult> run_validation(const ValidateOptions& options);
int cmd_validate(const ValidateOptions& options, std::ostream& out);

/// Command-line entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace topoloc::cli
