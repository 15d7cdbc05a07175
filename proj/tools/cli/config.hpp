#ifndef SMARENA_CLI_CONFIG_HPP
#define SMARENA_CLI_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smarena/game.hpp"
#include "smarena/simulator.hpp"
#include "smarena/sweep.hpp"

namespace smarena::cli {

/// Bad configuration (file or flags). Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// I/O failure on an output or state file. Exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RowOrder { Canonical, Completion };

struct RunConfig {
  SimConfig sim;
  std::optional<std::uint64_t> seed;  // unset -> entropy seed, recorded in the summary
  double epsilon = 1e-4;
  EquilibriumAggregate aggregate = EquilibriumAggregate::Max;
  bool hm_preference = true;

  // simulate / game
  std::vector<double> powers;
  std::vector<StrategyKind> strategies;
  std::vector<MinerType> types;

  // sweep / thresholds / report
  std::vector<std::size_t> n_malicious{1};
  std::optional<double> step;  // unset -> default_step(n)
  Model model = Model::Fixed;
  bool equal_power = false;

  int jobs = 1;
  std::string out = "out";
  bool resume = false;
  RowOrder order = RowOrder::Canonical;

  [[nodiscard]] double step_for(std::size_t n) const { return step ? *step : default_step(n); }
  [[nodiscard]] GridSpec grid(std::size_t n) const { return {n, step_for(n), model}; }
};

/**
 * Applies `key = value` lines from a config file. Blank lines and `#`
 * comments are ignored. Errors carry `path:line:`.
 */
void load_config_file(const std::string& path, RunConfig& config);

/// Applies one setting; `where` prefixes error messages.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::string& where);

/// Checks cross-field consistency for a command. Throws ConfigError.
void validate_for(const RunConfig& config, const std::string& command);

/// Settings that determine results (everything but jobs, out, resume, order),
/// one `key=value` per line in a fixed order.
std::string canonical_settings(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace smarena::cli

#endif  // SMARENA_CLI_CONFIG_HPP
