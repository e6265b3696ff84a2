#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "shipdock/scenario.hpp"

namespace shipdock {

enum ExitCode : int {
  kExitOk = 0,
  kExitNotDocked = 1,
  kExitValidation = 2,
  kExitSolverFailure = 3,
  kExitDerivativeFailure = 4,
};

struct CommandOptions {
  std::string scenario;  // file path or bundled scenario name
  std::filesystem::path out = "out";
  std::optional<double> duration;  // simulate only; default 600 s
  std::uint64_t seed = 1;
  std::optional<double> horizon;   // overrides horizon.T
  std::optional<int> intervals;    // overrides horizon.intervals
  std::optional<std::filesystem::path> trajectory;  // plot only; default <out>/trajectory.csv
  bool verbose = false;
};

// Loads the scenario and applies the horizon overrides.
Scenario load_command_scenario(const CommandOptions& options);

// Each command returns its exit code. Library errors propagate; run_command maps them.
int cmd_solve(const CommandOptions& options, std::ostream& out);
int cmd_simulate(const CommandOptions& options, std::ostream& out);
int cmd_check_derivatives(const CommandOptions& options, std::ostream& out);
int cmd_plot(const CommandOptions& options, std::ostream& out);

// Calls `command`, printing errors to `err`: input and validation errors give kExitValidation,
// anything else kExitSolverFailure.
int run_command(int (*command)(const CommandOptions&, std::ostream&), const CommandOptions& options,
                std::ostream& out, std::ostream& err);

}  // namespace shipdock
