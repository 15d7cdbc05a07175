#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"
#include "output.hpp"

namespace smarena::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Seeded {
  std::uint64_t seed;
  const char* source;
};

Seeded resolve_seed(RunConfig& c) {
  if (c.seed) return {*c.seed, "flag"};
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  c.seed = s;
  return {s, "entropy"};
}

void set_threads(int jobs) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, jobs));
#else
  (void)jobs;
#endif
}

fs::path prepare_out(const RunConfig& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
  return dir;
}

json base_summary(const std::string& command, const RunConfig& c, const Seeded& seed) {
  json s;
  s["tool"] = "sm-arena";
  s["version"] = kToolVersion;
  s["schema"] = kSchemaVersion;
  s["command"] = command;
  s["seed"] = seed.seed;
  s["seed_source"] = seed.source;
  s["config_hash"] = config_hash(c);
  s["parameters"] = {{"alpha", c.sim.alpha},     {"step_cap", c.sim.step_cap},
                     {"repetitions", c.sim.repetitions}, {"window", c.sim.window},
                     {"epsilon", c.epsilon},     {"aggregate", to_string(c.aggregate)},
                     {"hm_preference", c.hm_preference}};
  return s;
}

void save_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

double mean_steps(const SimResult& r) {
  if (r.steps_used.empty()) return 0.0;
  double s = 0.0;
  for (auto v : r.steps_used) s += static_cast<double>(v);
  return s / static_cast<double>(r.steps_used.size());
}

SimConfig sim_config(const RunConfig& c) {
  SimConfig s = c.sim;
  s.seed = *c.seed;
  return s;
}

// Settings that change simulated numbers; a resumed sweep must match them.
std::string simulation_settings(const RunConfig& c) {
  return fmt::format("alpha={}\ncap={}\nreps={}\nwindow={}\nseed={}\n", c.sim.alpha, c.sim.step_cap,
                     c.sim.repetitions, c.sim.window, *c.seed);
}

std::string recordable_settings(const RunConfig& c) {
  // canonical_settings minus `step=default`, which is not a valid value.
  std::string out;
  std::istringstream in(canonical_settings(c));
  std::string line;
  while (std::getline(in, line)) {
    if (line == "step=default") continue;
    out += line + "\n";
  }
  return out;
}

std::string units_cell(std::optional<int> units, int total) {
  if (!units) return "NOT_FOUND";
  return cell(static_cast<double>(*units) / total);
}

std::string witness_cell(const std::optional<Witness>& w) {
  return w ? std::to_string(w->allocation_id) : std::string();
}

}  // namespace

// ---- simulate -----------------------------------------------------------------

int cmd_simulate(RunConfig c, std::ostream& log) {
  validate_for(c, "simulate");
  const Seeded seed = resolve_seed(c);
  set_threads(c.jobs);
  const fs::path dir = prepare_out(c);
  const std::string hash = config_hash(c);

  const Instance inst{{c.powers}, c.strategies};
  const SimResult r = simulate_instance(inst, sim_config(c));

  CsvTable table(seed.seed, hash,
                 {"miner", "strategy", "power", "mean_reward", "sem", "converged_fraction", "mean_steps"});
  for (std::size_t i = 0; i < inst.size(); ++i) {
    table.row(i, to_string(inst.strategies[i]), c.powers[i], r.mean_rewards[i], r.sem[i],
              r.converged_fraction, mean_steps(r));
  }
  table.save(dir / "rewards.csv");

  json s = base_summary("simulate", c, seed);
  s["powers"] = c.powers;
  json strategies = json::array();
  for (auto k : c.strategies) strategies.push_back(std::string(to_string(k)));
  s["strategies"] = strategies;
  s["mean_rewards"] = r.mean_rewards;
  s["sem"] = r.sem;
  s["converged_fraction"] = r.converged_fraction;
  s["mean_steps"] = mean_steps(r);
  s["outputs"] = {"rewards.csv"};
  save_json(dir / "summary.json", s);
  log << fmt::format("simulate: {} miners, {} repetitions, seed {} -> {}\n", inst.size(),
                     c.sim.repetitions, seed.seed, (dir / "rewards.csv").string());
  return kExitOk;
}

// ---- game ---------------------------------------------------------------------

int cmd_game(RunConfig c, std::ostream& log) {
  validate_for(c, "game");
  const Seeded seed = resolve_seed(c);
  set_threads(c.jobs);
  const fs::path dir = prepare_out(c);
  const std::string hash = config_hash(c);

  const PowerAllocation alloc{c.powers};
  const GameTable game = build_game(alloc, c.types, sim_config(c));
  const EquilibriumSet eqs = epsilon_pe(game, c.epsilon);
  const EquilibriumSet pref = hm_preference_filter(eqs, game);

  CsvTable games(seed.seed, hash,
                 {"allocation_id", "profile_bits", "miner", "type", "power", "strategy", "payoff", "sem"});
  for (ProfileBits b = 0; b < game.profile_count(); ++b) {
    const auto& p = game.payoffs[b];
    for (std::size_t i = 0; i < game.n_miners(); ++i) {
      games.row(0, game.bits_string(b), i, to_string(game.types[i]), c.powers[i],
                to_string(p.choices[i]), p.payoff[i], p.sem[i]);
    }
  }
  games.save(dir / "games.csv");

  CsvTable eq_table(seed.seed, hash, {"allocation_id", "profile_bits", "hm_preferred"});
  for (ProfileBits b : eqs.equilibria) {
    const bool kept = std::find(pref.equilibria.begin(), pref.equilibria.end(), b) != pref.equilibria.end();
    eq_table.row(0, game.bits_string(b), kept ? 1 : 0);
  }
  eq_table.save(dir / "equilibria.csv");

  json s = base_summary("game", c, seed);
  s["powers"] = c.powers;
  json types = json::array();
  for (auto t : c.types) types.push_back(std::string(to_string(t)));
  s["types"] = types;
  json all = json::array(), kept = json::array();
  for (auto b : eqs.equilibria) all.push_back(game.bits_string(b));
  for (auto b : pref.equilibria) kept.push_back(game.bits_string(b));
  s["equilibria"] = all;
  s["hm_preferred"] = kept;
  s["outputs"] = {"games.csv", "equilibria.csv"};
  save_json(dir / "summary.json", s);
  log << fmt::format("game: {} profiles, {} equilibria, {} after HM preference\n",
                     game.profile_count(), eqs.equilibria.size(), pref.equilibria.size());
  return kExitOk;
}

// ---- sweep / thresholds ---------------------------------------------------------

namespace {

struct SweepPlan {
  struct Grid {
    GridSpec spec;
    std::vector<GridAllocation> allocations;
    std::vector<GridAllocation> equal;  // empty unless equal_power
  };
  std::vector<Grid> grids;
  std::vector<CanonicalTask> tasks;
};

SweepPlan make_plan(const RunConfig& c) {
  SweepPlan plan;
  std::vector<Instance> requests;
  for (std::size_t n : c.n_malicious) {
    SweepPlan::Grid g;
    g.spec = c.grid(n);
    g.allocations = enumerate_allocations(g.spec);
    auto req = required_instances(g.spec, g.allocations);
    requests.insert(requests.end(), req.begin(), req.end());
    if (c.equal_power) {
      g.equal = equal_power_allocations(n, g.spec.step);
      req = required_instances(g.spec, g.equal);
      requests.insert(requests.end(), req.begin(), req.end());
    }
    plan.grids.push_back(std::move(g));
  }
  plan.tasks = plan_tasks(requests);
  return plan;
}

void write_task_index(const SweepPlan& plan, std::uint64_t seed, const std::string& hash,
                      const fs::path& path) {
  CsvTable t(seed, hash, {"grid", "model", "n", "allocation_id", "profile_bits", "key"});
  for (const auto& g : plan.grids) {
    auto emit = [&](const char* grid, const std::vector<GridAllocation>& allocs) {
      std::size_t i = 0;
      const auto inst = required_instances(g.spec, allocs);
      const std::size_t per = g.spec.model == Model::Fixed ? 1 : (std::size_t{1} << g.spec.n_malicious);
      for (const auto& a : allocs) {
        for (std::size_t b = 0; b < per; ++b, ++i) {
          std::string bits = "-";
          if (g.spec.model == Model::Dynamic) {
            bits.clear();
            for (std::size_t j = 0; j < g.spec.n_malicious; ++j) bits.push_back((b >> j) & 1 ? '1' : '0');
          }
          t.row(grid, to_string(g.spec.model), g.spec.n_malicious, a.id, bits, canonicalize(inst[i]).key);
        }
      }
    };
    emit("full", g.allocations);
    if (!g.equal.empty()) emit("equal", g.equal);
  }
  t.save(path);
}

void write_manifest(const fs::path& dir, const RunConfig& c, const SweepPlan& plan,
                    const ResultStore& store, const char* status) {
  json m;
  m["tool"] = "sm-arena";
  m["version"] = kToolVersion;
  m["schema"] = kSchemaVersion;
  m["seed"] = *c.seed;
  m["config_hash"] = config_hash(c);
  m["settings"] = recordable_settings(c);
  m["simulation"] = simulation_settings(c);
  json grids = json::array();
  for (const auto& g : plan.grids) {
    grids.push_back({{"n_malicious", g.spec.n_malicious},
                     {"step", g.spec.step},
                     {"model", to_string(g.spec.model)},
                     {"allocations", g.allocations.size()},
                     {"equal_power_allocations", g.equal.size()}});
  }
  m["grids"] = grids;
  std::size_t done = 0;
  json tasks = json::object();
  for (const auto& t : plan.tasks) {
    const bool ok = store.contains(t.key);
    done += ok ? 1 : 0;
    tasks[t.key] = ok ? "done" : "pending";
  }
  m["status"] = status;
  m["tasks_total"] = plan.tasks.size();
  m["tasks_done"] = done;
  m["tasks"] = tasks;
  save_json(dir / "manifest.json", m);
}

json write_analysis(const RunConfig& c, const SweepPlan& plan, const ResultStore& store,
                    std::uint64_t seed, const fs::path& dir) {
  const std::string hash = config_hash(c);
  const AnalysisOptions opts{c.epsilon, c.aggregate, c.hm_preference};

  CsvTable allocations(seed, hash,
                       {"n", "model", "allocation_id", "miner", "role", "power", "reward", "mean_reward"});
  CsvTable games(seed, hash, {"n", "allocation_id", "profile_bits", "miner", "type", "power",
                              "strategy", "payoff", "sem"});
  CsvTable equilibria(seed, hash, {"n", "allocation_id", "profile_bits", "hm_preferred"});
  const std::vector<std::string> curve_cols{"n", "model", "power", "mean_reward", "sem", "n_samples"};
  CsvTable curves(seed, hash, curve_cols);
  CsvTable hm_curves(seed, hash, curve_cols);
  CsvTable thresholds(seed, hash, {"n", "model", "power_threshold", "safety_level", "grid_step",
                                   "threshold_witness", "safety_witness"});
  CsvTable equal(seed, hash, {"k", "model", "power", "all_profitable", "min_reward", "max_reward"});
  CsvTable ranges(seed, hash, {"k", "model", "lo", "hi", "grid_step"});

  json summary_thresholds = json::array();
  json summary_ranges = json::array();
  std::vector<EqualPowerScan> scans;

  for (const auto& g : plan.grids) {
    const auto& spec = g.spec;
    const int total = spec.units();
    const std::size_t n = spec.n_malicious;
    const auto model = to_string(spec.model);
    const SweepAnalysis a = analyze(spec, g.allocations, store, opts);

    for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
      const auto& o = a.outcomes[i];
      const auto& m = a.mean_outcomes[i];
      for (std::size_t j = 0; j < n; ++j) {
        allocations.row(n, model, o.allocation_id, j, "malicious",
                        static_cast<double>(o.malicious_units[j]) / total, o.malicious_rewards[j],
                        m.malicious_rewards[j]);
      }
      allocations.row(n, model, o.allocation_id, n, "hm", static_cast<double>(o.hm_units) / total,
                      o.hm_reward, m.hm_reward);
    }
    for (std::size_t i = 0; i < a.games.size(); ++i) {
      const auto& game = a.games[i];
      const std::size_t id = a.allocations[i].id;
      for (ProfileBits b = 0; b < game.profile_count(); ++b) {
        const auto& p = game.payoffs[b];
        for (std::size_t j = 0; j < game.n_miners(); ++j) {
          games.row(n, id, game.bits_string(b), j, to_string(game.types[j]), game.allocation.powers[j],
                    to_string(p.choices[j]), p.payoff[j], p.sem[j]);
        }
      }
      const auto& pref = a.preferred[i].equilibria;
      for (ProfileBits b : a.equilibria[i].equilibria) {
        const bool kept = std::find(pref.begin(), pref.end(), b) != pref.end();
        equilibria.row(n, id, game.bits_string(b), kept ? 1 : 0);
      }
    }
    for (const auto& p : reward_curves(a.mean_outcomes, CurveGrouping::Malicious, spec.step)) {
      curves.row(n, model, static_cast<double>(p.power_units) / total, p.mean_reward, p.sem, p.n_samples);
    }
    for (const auto& p : reward_curves(a.mean_outcomes, CurveGrouping::HmCollective, spec.step)) {
      hm_curves.row(n, model, static_cast<double>(p.power_units) / total, p.mean_reward, p.sem, p.n_samples);
    }
    const ThresholdReport r = threshold_report(a.outcomes, spec);
    thresholds.row(n, model, units_cell(r.power_threshold.units, total),
                   units_cell(r.safety_level.units, total), spec.step,
                   witness_cell(r.power_threshold.witness), witness_cell(r.safety_level.witness));
    auto as_json = [total](std::optional<int> u) -> json {
      if (!u) return "NOT_FOUND";
      return static_cast<double>(*u) / total;
    };
    summary_thresholds.push_back({{"n", n},
                                  {"model", model},
                                  {"step", spec.step},
                                  {"power_threshold", as_json(r.power_threshold.units)},
                                  {"safety_level", as_json(r.safety_level.units)}});

    if (!g.equal.empty()) {
      const SweepAnalysis e = analyze(spec, g.equal, store, opts);
      const EqualPowerScan scan = equal_power_scan(e);
      for (std::size_t i = 0; i < scan.points.size(); ++i) {
        const auto& rw = e.outcomes[i].malicious_rewards;
        equal.row(n, model, static_cast<double>(scan.points[i].power_units) / total,
                  scan.points[i].all_profitable ? 1 : 0, *std::min_element(rw.begin(), rw.end()),
                  *std::max_element(rw.begin(), rw.end()));
      }
      scans.push_back(scan);
    }
  }
  for (const auto& r : multi_sm_ranges(scans)) {
    const int total = GridSpec{r.k, r.step, c.model}.units();
    ranges.row(r.k, to_string(c.model), static_cast<double>(r.lo_units) / total,
               static_cast<double>(r.hi_units) / total, r.step);
    summary_ranges.push_back({{"k", r.k},
                              {"lo", static_cast<double>(r.lo_units) / total},
                              {"hi", static_cast<double>(r.hi_units) / total}});
  }

  allocations.save(dir / "allocations.csv");
  games.save(dir / "games.csv");
  equilibria.save(dir / "equilibria.csv");
  curves.save(dir / "curves.csv");
  hm_curves.save(dir / "hm_curves.csv");
  thresholds.save(dir / "thresholds.csv");
  json outputs = {"allocations.csv", "games.csv", "equilibria.csv", "curves.csv", "hm_curves.csv",
                  "thresholds.csv"};
  if (c.equal_power) {
    equal.save(dir / "equal_power.csv");
    ranges.save(dir / "ranges.csv");
    outputs.push_back("equal_power.csv");
    outputs.push_back("ranges.csv");
  }
  return {{"thresholds", summary_thresholds}, {"ranges", summary_ranges}, {"outputs", outputs}};
}

void write_instances(const ResultStore& store, const std::vector<std::string>& order,
                     std::uint64_t seed, const std::string& hash, const fs::path& path) {
  CsvTable t(seed, hash, {"key", "miner", "strategy", "power", "mean_reward", "sem",
                          "converged_fraction", "mean_steps"});
  for (const auto& key : order) {
    const auto it = store.find(key);
    if (it == store.end()) continue;
    const auto& r = it->second;
    // The key spells out the canonical instance: STRATEGY:power|...
    std::istringstream parts(key);
    std::string part;
    std::size_t i = 0;
    while (std::getline(parts, part, '|')) {
      const auto colon = part.find(':');
      t.row(key, i, part.substr(0, colon), part.substr(colon + 1), r.mean_rewards[i], r.sem[i],
            r.converged_fraction, mean_steps(r));
      ++i;
    }
  }
  t.save(path);
}

std::vector<std::string> completion_order(const fs::path& results) {
  std::vector<std::string> keys;
  std::ifstream in(results);
  std::string line;
  while (std::getline(in, line)) {
    json j = json::parse(line, nullptr, false);
    if (!j.is_discarded() && j.contains("key")) keys.push_back(j["key"].get<std::string>());
  }
  return keys;
}

json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) return nullptr;
  json m = json::parse(in, nullptr, false);
  if (m.is_discarded()) throw IoError(fmt::format("{} is not valid JSON", (dir / "manifest.json").string()));
  return m;
}

}  // namespace

std::string recorded_settings(const fs::path& dir) {
  const json m = read_manifest(dir);
  if (m.is_null() || !m.contains("settings")) return {};
  return m["settings"].get<std::string>();
}

int cmd_sweep(RunConfig c, std::ostream& log, const CommandOptions& options) {
  validate_for(c, "sweep");
  const fs::path dir = prepare_out(c);
  const json previous = read_manifest(dir);
  if (!previous.is_null() && !c.resume) {
    throw ConfigError(fmt::format("{} already holds a sweep; pass --resume or choose another --out",
                                  dir.string()));
  }
  if (c.resume && !previous.is_null() && !c.seed) c.seed = previous["seed"].get<std::uint64_t>();
  const Seeded seed = resolve_seed(c);
  if (c.resume && !previous.is_null() && previous["simulation"].get<std::string>() != simulation_settings(c)) {
    throw ConfigError("--resume: simulation settings differ from the recorded sweep (alpha, cap, reps, window, seed)");
  }
  const std::string hash = config_hash(c);

  const SweepPlan plan = make_plan(c);
  const fs::path results_path = dir / "results.jsonl";
  ResultStore store = c.resume ? load_results(results_path) : ResultStore{};
  if (!c.resume) {
    std::error_code ec;
    fs::remove(results_path, ec);
  }
  write_task_index(plan, seed.seed, hash, dir / "tasks.csv");
  write_manifest(dir, c, plan, store, "running");

  std::vector<CanonicalTask> pending;
  for (const auto& t : plan.tasks) {
    if (!store.contains(t.key)) pending.push_back(t);
  }
  const std::size_t reused = plan.tasks.size() - pending.size();
  bool interrupted = false;
  if (options.stop_after && *options.stop_after < pending.size()) {
    pending.resize(*options.stop_after);
    interrupted = true;
  }
  log << fmt::format("sweep: {} tasks, {} already done, running {} on {} thread(s)\n",
                     plan.tasks.size(), reused, pending.size(), c.jobs);

  {
    bool torn_tail = false;
    if (std::ifstream prev{results_path, std::ios::binary}; prev && prev.seekg(-1, std::ios::end)) {
      torn_tail = prev.get() != '\n';
    }
    std::ofstream results(results_path, std::ios::app | std::ios::binary);
    if (!results) throw IoError(fmt::format("cannot open {}", results_path.string()));
    if (torn_tail) results << '\n';  // cut off an interrupted record
    std::size_t finished = 0;
    const std::size_t report_every = std::max<std::size_t>(1, pending.size() / 10);
    run_tasks(pending, sim_config(c), store, c.jobs,
              [&](const CanonicalTask& task, const SimResult& r) {
                results << result_line(task.key, r);
                results.flush();
                if (!results) throw IoError(fmt::format("write failed on {}", results_path.string()));
                if (++finished % report_every == 0 || finished == pending.size()) {
                  log << fmt::format("sweep: {}/{} simulated\n", finished, pending.size());
                }
              });
  }

  if (interrupted) {
    write_manifest(dir, c, plan, store, "interrupted");
    log << "sweep: stopped early; rerun with --resume to finish\n";
    return kExitIncomplete;
  }
  write_manifest(dir, c, plan, store, "complete");

  std::vector<std::string> order;
  if (c.order == RowOrder::Completion) {
    order = completion_order(results_path);
  } else {
    for (const auto& t : plan.tasks) order.push_back(t.key);
  }
  write_instances(store, order, seed.seed, hash, dir / "instances.csv");

  json s = base_summary("sweep", c, seed);
  json analysis = write_analysis(c, plan, store, seed.seed, dir);
  s["grids"] = json::array();
  for (const auto& g : plan.grids) {
    s["grids"].push_back({{"n_malicious", g.spec.n_malicious},
                          {"step", g.spec.step},
                          {"model", to_string(g.spec.model)},
                          {"allocations", g.allocations.size()}});
  }
  s["tasks"] = {{"total", plan.tasks.size()}, {"simulated", pending.size()}, {"reused", reused}};
  s["thresholds"] = analysis["thresholds"];
  s["ranges"] = analysis["ranges"];
  json outputs = analysis["outputs"];
  outputs.push_back("instances.csv");
  outputs.push_back("tasks.csv");
  outputs.push_back("manifest.json");
  outputs.push_back("results.jsonl");
  s["outputs"] = outputs;
  save_json(dir / "summary.json", s);
  for (const auto& t : s["thresholds"]) {
    log << fmt::format("n={} {}: power threshold {}, safety level {}\n", t["n"].get<std::size_t>(),
                       t["model"].get<std::string>(), t["power_threshold"].dump(), t["safety_level"].dump());
  }
  return kExitOk;
}

int cmd_thresholds(RunConfig c, std::ostream& log) {
  validate_for(c, "thresholds");
  const fs::path dir(c.out);
  const json m = read_manifest(dir);
  if (m.is_null()) {
    throw IncompleteResults(fmt::format("{} holds no sweep (manifest.json missing)", dir.string()), {});
  }
  if (!c.seed) c.seed = m["seed"].get<std::uint64_t>();
  const Seeded seed{*c.seed, "manifest"};
  const ResultStore store = load_results(dir / "results.jsonl");
  const SweepPlan plan = make_plan(c);
  json s = base_summary("thresholds", c, seed);
  json analysis = write_analysis(c, plan, store, seed.seed, dir);
  s["thresholds"] = analysis["thresholds"];
  s["ranges"] = analysis["ranges"];
  s["outputs"] = analysis["outputs"];
  save_json(dir / "thresholds.json", s);
  for (const auto& t : s["thresholds"]) {
    log << fmt::format("n={} {}: power threshold {}, safety level {}\n", t["n"].get<std::size_t>(),
                       t["model"].get<std::string>(), t["power_threshold"].dump(), t["safety_level"].dump());
  }
  return kExitOk;
}

int cmd_report(RunConfig c, std::ostream& out) {
  validate_for(c, "report");
  const fs::path dir(c.out);
  const json m = read_manifest(dir);
  if (m.is_null()) {
    throw IncompleteResults(fmt::format("{} holds no sweep (manifest.json missing)", dir.string()), {});
  }
  const ResultStore store = load_results(dir / "results.jsonl");
  const SweepPlan plan = make_plan(c);
  const AnalysisOptions opts{c.epsilon, c.aggregate, c.hm_preference};
  out << fmt::format("sweep in {} (seed {}, {} stored results)\n", dir.string(),
                     m["seed"].get<std::uint64_t>(), store.size());
  std::vector<EqualPowerScan> scans;
  for (const auto& g : plan.grids) {
    const SweepAnalysis a = analyze(g.spec, g.allocations, store, opts);
    const ThresholdReport r = threshold_report(a.outcomes, g.spec);
    const int total = g.spec.units();
    out << fmt::format("n={} model={} step={} allocations={}\n", g.spec.n_malicious,
                       to_string(g.spec.model), g.spec.step, g.allocations.size());
    out << fmt::format("  power threshold: {}\n", units_cell(r.power_threshold.units, total));
    out << fmt::format("  safety level:    {}\n", units_cell(r.safety_level.units, total));
    if (g.spec.model == Model::Dynamic) {
      std::size_t raw = 0, kept = 0, none = 0;
      for (std::size_t i = 0; i < a.equilibria.size(); ++i) {
        raw += a.equilibria[i].equilibria.size();
        kept += a.preferred[i].equilibria.size();
        none += a.equilibria[i].equilibria.empty() ? 1 : 0;
      }
      const double count = static_cast<double>(a.equilibria.size());
      out << fmt::format("  equilibria per allocation: {:.3f} ({:.3f} after HM preference), {} without any\n",
                         static_cast<double>(raw) / count, static_cast<double>(kept) / count, none);
    }
    if (!g.equal.empty()) scans.push_back(equal_power_scan(analyze(g.spec, g.equal, store, opts)));
  }
  for (const auto& r : multi_sm_ranges(scans)) {
    const double total = GridSpec{r.k, r.step, c.model}.units();
    out << fmt::format("k={} equal-power profitable range: [{}, {}]\n", r.k, r.lo_units / total,
                       r.hi_units / total);
  }
  return kExitOk;
}

int run_command(const std::string& command, const RunConfig& config, std::ostream& log,
                std::ostream& err, const CommandOptions& options) {
  try {
    if (command == "simulate") return cmd_simulate(config, log);
    if (command == "game") return cmd_game(config, log);
    if (command == "sweep") return cmd_sweep(config, log, options);
    if (command == "thresholds") return cmd_thresholds(config, log);
    if (command == "report") return cmd_report(config, log);
    err << "sm-arena: unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "sm-arena: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IncompleteResults& e) {
    err << "sm-arena: incomplete sweep: " << e.what() << "\n";
    for (std::size_t i = 0; i < e.missing().size() && i < 10; ++i) err << "  missing " << e.missing()[i] << "\n";
    return kExitIncomplete;
  } catch (const IoError& e) {
    err << "sm-arena: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "sm-arena: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "sm-arena: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "sm-arena: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace smarena::cli
