#ifndef SMARENA_CLI_COMMANDS_HPP
#define SMARENA_CLI_COMMANDS_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"

namespace smarena::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitIncomplete = 3,
  kExitIo = 4,
};

struct CommandOptions {
  /// Simulate at most this many pending tasks, then stop as if interrupted.
  std::optional<std::size_t> stop_after;
};

int cmd_simulate(RunConfig config, std::ostream& log);
int cmd_game(RunConfig config, std::ostream& log);
int cmd_sweep(RunConfig config, std::ostream& log, const CommandOptions& options = {});
int cmd_thresholds(RunConfig config, std::ostream& log);
int cmd_report(RunConfig config, std::ostream& out);

/// Dispatches by name and maps exceptions to exit codes, printing the message to `err`.
int run_command(const std::string& command, const RunConfig& config, std::ostream& log,
                std::ostream& err, const CommandOptions& options = {});

/// Settings recorded by a previous sweep in `dir`, as `key=value` lines; empty if none.
std::string recorded_settings(const std::filesystem::path& dir);

}  // namespace smarena::cli

#endif  // SMARENA_CLI_COMMANDS_HPP
