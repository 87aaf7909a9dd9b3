#pragma once

// Subcommands of the dsm tool. Each returns its outputs as named documents;
// the front end writes them to files or stdout.

#include <string>
#include <vector>

#include "dsm/app/config.hpp"

namespace dsm::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitIo = 4;

struct Document {
  std::string name;  ///< file name, e.g. "iterate.csv"
  std::string content;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<Document> documents;
  std::string message;  ///< diagnostic for stderr; empty on clean success
};

CommandResult run_dp(const ExperimentConfig& cfg);
CommandResult run_flow(const ExperimentConfig& cfg);
CommandResult run_iterate(const ExperimentConfig& cfg);
CommandResult run_bench(const ExperimentConfig& cfg);
CommandResult run_schedule_check(const ExperimentConfig& cfg);
CommandResult run_ineq(const ExperimentConfig& cfg);

/// Dispatches on the subcommand name; library errors become exit codes.
CommandResult run_command(const std::string& name, const ExperimentConfig& cfg);

[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

/// Full command-line entry point (argument parsing, config loading, output).
int cli_main(int argc, char** argv);

}  // namespace dsm::app
