// sm-arena: selfish-mining simulator and empirical game analysis.
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"

using namespace smarena::cli;

namespace {

// Flag name -> config key, applied in this order after the config file.
const std::pair<const char*, const char*> kValueFlags[] = {
    {"--seed", "seed"},       {"--reps", "reps"},       {"--cap", "cap"},
    {"--alpha", "alpha"},     {"--window", "window"},   {"--epsilon", "epsilon"},
    {"--step", "step"},       {"--n-malicious", "n_malicious"},
    {"--model", "model"},     {"--aggregate", "aggregate"},
    {"--powers", "powers"},   {"--strategies", "strategies"},
    {"--types", "types"},     {"--jobs", "jobs"},       {"--out", "out"},
};

struct Flags {
  std::string config_file;
  std::map<std::string, std::string> values;
  bool resume = false;
  bool desk_scale = false;
  bool equal_power = false;
  bool no_hm_preference = false;
  std::string sort = "canonical";
  std::size_t stop_after = 0;
};

void add_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_file, "flat key = value config file");
  for (const auto& [flag, key] : kValueFlags) {
    sub->add_option(flag, f.values[key]);
  }
  sub->get_option("--seed")->description("master seed (entropy seed when absent)");
  sub->get_option("--reps")->description("repetitions per instance");
  sub->get_option("--cap")->description("timestep cap per run");
  sub->get_option("--alpha")->description("convergence tolerance");
  sub->get_option("--window")->description("convergence window in measured timesteps");
  sub->get_option("--epsilon")->description("equilibrium tolerance");
  sub->get_option("--step")->description("grid step (default by number of malicious miners)");
  sub->get_option("--n-malicious")->description("number of malicious miners; comma list allowed");
  sub->get_option("--model")->description("fixed | dynamic");
  sub->get_option("--aggregate")->description("score over surviving equilibria: max | min | mean");
  sub->get_option("--powers")->description("comma-separated mining powers");
  sub->get_option("--strategies")->description("comma-separated HM/SM (simulate)");
  sub->get_option("--types")->description("comma-separated HM/StrM (game)");
  sub->get_option("--jobs")->description("worker threads");
  sub->get_option("--out")->description("output directory");
  sub->add_flag("--resume", f.resume, "continue the sweep recorded in --out");
  sub->add_flag("--desk-scale", f.desk_scale, "20 repetitions, cap 50000");
  sub->add_flag("--equal-power", f.equal_power, "also scan equal-power allocations");
  sub->add_flag("--no-hm-preference", f.no_hm_preference, "skip the HM-preference filter");
  sub->add_option("--sort", f.sort, "row order of instances.csv: canonical | completion")
      ->check(CLI::IsMember({"canonical", "completion"}));
  sub->add_option("--stop-after", f.stop_after)->group("");  // testing: simulate N tasks then stop
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sm-arena: selfish-mining simulator and empirical game analysis"};
  app.require_subcommand(1, 1);
  Flags flags;
  const char* commands[][2] = {
      {"simulate", "run one fixed-strategy system"},
      {"game", "build one game table and its equilibria"},
      {"sweep", "simulate a power-allocation grid and analyse it"},
      {"thresholds", "recompute thresholds and curves from a finished sweep"},
      {"report", "print a summary of a sweep"},
  };
  for (const auto& [name, help] : commands) add_options(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig config;
  try {
    const auto out_it = flags.values.find("out");
    if ((command == "thresholds" || command == "report") && !out_it->second.empty()) {
      std::istringstream recorded(recorded_settings(out_it->second));
      std::string line;
      while (std::getline(recorded, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq + 1 == line.size()) continue;
        apply_setting(config, line.substr(0, eq), line.substr(eq + 1), "manifest.json");
      }
    }
    if (!flags.config_file.empty()) load_config_file(flags.config_file, config);
    if (flags.desk_scale) apply_setting(config, "desk_scale", "true", "--desk-scale");
    for (const auto& [flag, key] : kValueFlags) {
      const auto& v = flags.values[key];
      if (!v.empty()) apply_setting(config, key, v, flag);
    }
    if (flags.equal_power) config.equal_power = true;
    if (flags.no_hm_preference) config.hm_preference = false;
    config.resume = flags.resume;
    config.order = flags.sort == "completion" ? RowOrder::Completion : RowOrder::Canonical;
  } catch (const ConfigError& e) {
    std::cerr << "sm-arena: config error: " << e.what() << "\n";
    return kExitConfig;
  }

  CommandOptions options;
  if (flags.stop_after > 0) options.stop_after = flags.stop_after;
  return run_command(command, config, std::cerr, std::cerr, options);
}
