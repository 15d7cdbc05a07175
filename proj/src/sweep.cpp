#include "smarena/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <fmt/format.h>
#ifdef _OPENMP
#include <omp.h>
#endif

namespace smarena {

namespace {

// Guards the strict/non-strict reward comparisons against rounding in the
// proportional split of the HM collective.
constexpr double kCompareSlack = 1e-12;

std::string lower(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return s;
}

}  // namespace

std::string_view to_string(Model model) { return model == Model::Fixed ? "fixed" : "dynamic"; }

Model parse_model(std::string_view text) {
  const auto s = lower(text);
  if (s == "fixed") return Model::Fixed;
  if (s == "dynamic") return Model::Dynamic;
  throw std::invalid_argument("unknown model '" + std::string(text) + "' (expected fixed or dynamic)");
}

std::string_view to_string(EquilibriumAggregate agg) {
  switch (agg) {
    case EquilibriumAggregate::Max: return "max";
    case EquilibriumAggregate::Min: return "min";
    case EquilibriumAggregate::Mean: return "mean";
  }
  return "max";
}

EquilibriumAggregate parse_aggregate(std::string_view text) {
  const auto s = lower(text);
  if (s == "max") return EquilibriumAggregate::Max;
  if (s == "min") return EquilibriumAggregate::Min;
  if (s == "mean") return EquilibriumAggregate::Mean;
  throw std::invalid_argument("unknown aggregate '" + std::string(text) + "' (expected max, min or mean)");
}

double default_step(std::size_t n_malicious) {
  if (n_malicious <= 3) return 0.01;
  if (n_malicious == 4) return 0.02;
  if (n_malicious <= 7) return 0.04;
  return 0.05;
}

int GridSpec::units() const {
  if (!(step > 0.0) || step > 1.0) throw std::invalid_argument("grid step must be in (0, 1]");
  const double inv = 1.0 / step;
  const double rounded = std::round(inv);
  if (std::abs(inv - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw std::invalid_argument(fmt::format("grid step {} does not divide 1", step));
  }
  return static_cast<int>(rounded);
}

void GridSpec::validate() const {
  if (n_malicious == 0) throw std::invalid_argument("need at least one malicious miner");
  if (n_malicious > 16) throw std::invalid_argument("at most 16 malicious miners are supported");
  (void)units();
}

PowerAllocation GridAllocation::to_allocation(int units) const {
  PowerAllocation a;
  for (int m : malicious_units) a.powers.push_back(static_cast<double>(m) / units);
  a.powers.push_back(static_cast<double>(hm_units) / units);
  return a;
}

std::vector<GridAllocation> enumerate_allocations(const GridSpec& spec) {
  spec.validate();
  const int total = spec.units();
  std::vector<GridAllocation> out;
  std::vector<int> current;
  std::function<void(int, int)> rec = [&](int min_units, int remaining) {
    if (current.size() == spec.n_malicious) {
      out.push_back({out.size(), current, remaining});
      return;
    }
    for (int u = min_units; u <= remaining; ++u) {
      current.push_back(u);
      rec(u, remaining - u);
      current.pop_back();
    }
  };
  rec(0, total);
  return out;
}

std::vector<GridAllocation> equal_power_allocations(std::size_t k, double step) {
  GridSpec spec{k, step, Model::Fixed};
  spec.validate();
  const int total = spec.units();
  std::vector<GridAllocation> out;
  const int kk = static_cast<int>(k);
  for (int u = 0; u * kk <= total; ++u) {
    out.push_back({out.size(), std::vector<int>(k, u), total - u * kk});
  }
  return out;
}

// ---- tasks ------------------------------------------------------------------

namespace {

std::vector<MinerType> grid_types(std::size_t n) {
  std::vector<MinerType> types(n, MinerType::StrM);
  types.push_back(MinerType::HM);
  return types;
}

std::vector<StrategyKind> fixed_strategies(std::size_t n) {
  std::vector<StrategyKind> s(n, StrategyKind::SM);
  s.push_back(StrategyKind::HM);
  return s;
}

}  // namespace

std::vector<Instance> required_instances(const GridSpec& spec,
                                         std::span<const GridAllocation> allocations) {
  const int units = spec.units();
  std::vector<Instance> out;
  for (const auto& a : allocations) {
    const PowerAllocation alloc = a.to_allocation(units);
    if (spec.model == Model::Fixed) {
      out.push_back({alloc, fixed_strategies(spec.n_malicious)});
    } else {
      const std::size_t profiles = std::size_t{1} << spec.n_malicious;
      for (std::size_t bits = 0; bits < profiles; ++bits) {
        std::vector<StrategyKind> s(spec.n_malicious + 1, StrategyKind::HM);
        for (std::size_t j = 0; j < spec.n_malicious; ++j) {
          if (bits & (std::size_t{1} << j)) s[j] = StrategyKind::SM;
        }
        out.push_back({alloc, std::move(s)});
      }
    }
  }
  return out;
}

std::vector<CanonicalTask> plan_tasks(std::span<const Instance> requests) {
  std::map<std::string, Instance> unique;
  for (const auto& inst : requests) {
    auto form = canonicalize(inst);
    unique.emplace(form.key, std::move(form.instance));
  }
  std::vector<CanonicalTask> out;
  out.reserve(unique.size());
  for (auto& [key, inst] : unique) out.push_back({key, std::move(inst)});
  return out;
}

SimResult run_task(const CanonicalTask& task, const SimConfig& config) {
  SimConfig cfg = config;
  cfg.seed = instance_seed(config.seed, task.key);
  return run_replicated(task.instance.allocation, task.instance.strategies, cfg);
}

void run_tasks(std::span<const CanonicalTask> tasks, const SimConfig& config, ResultStore& store,
               int jobs, const TaskCallback& on_done) {
  config.validate();
  std::vector<const CanonicalTask*> pending;
  for (const auto& t : tasks) {
    if (!store.contains(t.key)) pending.push_back(&t);
  }
  const auto n = static_cast<std::int64_t>(pending.size());
  const int threads = std::max(1, jobs);
#ifdef _OPENMP
  const int saved_nested = omp_get_max_active_levels();
  omp_set_max_active_levels(1);
#endif
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    const CanonicalTask& task = *pending[static_cast<std::size_t>(i)];
    SimResult r = run_task(task, config);
#pragma omp critical(smarena_store)
    {
      if (on_done) on_done(task, r);
      store.emplace(task.key, std::move(r));
    }
  }
#ifdef _OPENMP
  omp_set_max_active_levels(saved_nested);
#endif
}

SimResult lookup(const ResultStore& store, const Instance& instance) {
  const CanonicalForm form = canonicalize(instance);
  const auto it = store.find(form.key);
  if (it == store.end()) {
    throw IncompleteResults("no simulation result for instance " + form.key, {form.key});
  }
  return restore(it->second, form, instance);
}

// ---- analysis ---------------------------------------------------------------

namespace {

AllocationOutcome outcome_from(const GridAllocation& a, std::span<const double> rewards) {
  AllocationOutcome o;
  o.allocation_id = a.id;
  o.malicious_units = a.malicious_units;
  o.hm_units = a.hm_units;
  o.malicious_rewards.assign(rewards.begin(), rewards.begin() + static_cast<std::ptrdiff_t>(a.malicious_units.size()));
  o.hm_reward = rewards[a.malicious_units.size()];
  return o;
}

std::vector<double> aggregate_payoffs(const GameTable& game, std::span<const ProfileBits> set,
                                      EquilibriumAggregate agg) {
  const std::size_t n = game.n_miners();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = agg == EquilibriumAggregate::Min ? 1e300 : (agg == EquilibriumAggregate::Max ? -1e300 : 0.0);
    for (ProfileBits bits : set) {
      const double v = game.payoffs[bits].payoff[i];
      switch (agg) {
        case EquilibriumAggregate::Max: acc = std::max(acc, v); break;
        case EquilibriumAggregate::Min: acc = std::min(acc, v); break;
        case EquilibriumAggregate::Mean: acc += v; break;
      }
    }
    if (agg == EquilibriumAggregate::Mean) acc /= static_cast<double>(set.size());
    out[i] = acc;
  }
  return out;
}

}  // namespace

SweepAnalysis analyze(const GridSpec& spec, std::span<const GridAllocation> allocations,
                      const ResultStore& store, const AnalysisOptions& options) {
  spec.validate();
  const int units = spec.units();
  SweepAnalysis out;
  out.spec = spec;
  out.allocations.assign(allocations.begin(), allocations.end());

  std::vector<std::string> missing;
  for (const auto& inst : required_instances(spec, allocations)) {
    const auto key = canonicalize(inst).key;
    if (!store.contains(key)) missing.push_back(key);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    throw IncompleteResults(fmt::format("{} simulation results missing", missing.size()), missing);
  }

  const auto types = grid_types(spec.n_malicious);
  const PayoffSource source = [&store](const Instance& inst) { return lookup(store, inst); };
  for (const auto& a : allocations) {
    const PowerAllocation alloc = a.to_allocation(units);
    if (spec.model == Model::Fixed) {
      const SimResult r = lookup(store, {alloc, fixed_strategies(spec.n_malicious)});
      out.outcomes.push_back(outcome_from(a, r.mean_rewards));
      continue;
    }
    GameTable game = build_game(alloc, types, source);
    EquilibriumSet eqs = epsilon_pe(game, options.epsilon);
    EquilibriumSet pref = options.hm_preference ? hm_preference_filter(eqs, game) : eqs;
    std::vector<ProfileBits> scored = pref.equilibria;
    if (scored.empty()) {
      // No pure equilibrium: score over every profile.
      for (ProfileBits b = 0; b < game.profile_count(); ++b) scored.push_back(b);
    }
    out.outcomes.push_back(outcome_from(a, aggregate_payoffs(game, scored, options.aggregate)));
    out.mean_outcomes.push_back(
        outcome_from(a, aggregate_payoffs(game, scored, EquilibriumAggregate::Mean)));
    out.games.push_back(std::move(game));
    out.equilibria.push_back(std::move(eqs));
    out.preferred.push_back(std::move(pref));
  }
  if (spec.model == Model::Fixed) out.mean_outcomes = out.outcomes;
  return out;
}

namespace {

void check_coverage(std::span<const AllocationOutcome> outcomes, const GridSpec& spec) {
  std::set<std::size_t> seen;
  for (const auto& o : outcomes) seen.insert(o.allocation_id);
  std::vector<std::string> missing;
  for (const auto& a : enumerate_allocations(spec)) {
    if (!seen.contains(a.id)) missing.push_back(std::to_string(a.id));
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? "," : "") + missing[i];
    throw IncompleteResults(
        fmt::format("{} allocations without results (ids {}{})", missing.size(), list,
                    missing.size() > 20 ? ",..." : ""),
        missing);
  }
}

/// Least key above every violated key, among keys that have rows.
BoundaryDecision least_clean(const std::map<int, bool>& violated, std::optional<Witness> witness) {
  BoundaryDecision d;
  d.witness = witness;
  std::optional<int> highest_violation;
  for (const auto& [k, bad] : violated) {
    if (bad) highest_violation = k;
  }
  for (const auto& [k, bad] : violated) {
    if (!highest_violation || k > *highest_violation) {
      d.units = k;
      break;
    }
  }
  return d;
}

bool threshold_ok(int units, int total, double reward) {
  if (units == total) return reward >= 1.0 - 1e-9;
  return reward > static_cast<double>(units) / total + kCompareSlack;
}

bool safety_ok(int units, int total, double reward) {
  return reward <= static_cast<double>(units) / total + kCompareSlack;
}

}  // namespace

BoundaryDecision power_threshold(std::span<const AllocationOutcome> outcomes, const GridSpec& spec) {
  check_coverage(outcomes, spec);
  const int total = spec.units();
  std::map<int, bool> violated;
  std::optional<Witness> witness;
  for (const auto& o : outcomes) {
    for (std::size_t j = 0; j < o.malicious_units.size(); ++j) {
      const int p = o.malicious_units[j];
      const bool ok = threshold_ok(p, total, o.malicious_rewards[j]);
      violated[p] = violated[p] || !ok;
      if (!ok && (!witness || p > witness->power_units)) {
        witness = Witness{o.allocation_id, j, p, o.malicious_rewards[j]};
      }
    }
  }
  BoundaryDecision d = least_clean(violated, witness);
  if (d.units) {
    for (const auto& o : outcomes) {
      for (std::size_t j = 0; j < o.malicious_units.size(); ++j) {
        if (o.malicious_units[j] >= *d.units &&
            !threshold_ok(o.malicious_units[j], total, o.malicious_rewards[j])) {
          throw std::logic_error("power_threshold: audit failed");
        }
      }
    }
  }
  return d;
}

BoundaryDecision safety_level(std::span<const AllocationOutcome> outcomes, const GridSpec& spec) {
  check_coverage(outcomes, spec);
  const int total = spec.units();
  std::map<int, bool> violated;
  std::optional<Witness> witness;
  for (const auto& o : outcomes) {
    bool ok = true;
    for (std::size_t j = 0; j < o.malicious_units.size(); ++j) {
      if (!safety_ok(o.malicious_units[j], total, o.malicious_rewards[j])) {
        ok = false;
        if (!witness || o.hm_units > witness->power_units) {
          witness = Witness{o.allocation_id, j, o.hm_units, o.malicious_rewards[j]};
        }
      }
    }
    violated[o.hm_units] = violated[o.hm_units] || !ok;
  }
  BoundaryDecision d = least_clean(violated, witness);
  if (d.units) {
    for (const auto& o : outcomes) {
      if (o.hm_units < *d.units) continue;
      for (std::size_t j = 0; j < o.malicious_units.size(); ++j) {
        if (!safety_ok(o.malicious_units[j], total, o.malicious_rewards[j])) {
          throw std::logic_error("safety_level: audit failed");
        }
      }
    }
  }
  return d;
}

ThresholdReport threshold_report(std::span<const AllocationOutcome> outcomes, const GridSpec& spec) {
  ThresholdReport r;
  r.n_malicious = spec.n_malicious;
  r.model = spec.model;
  r.step = spec.step;
  r.power_threshold = power_threshold(outcomes, spec);
  r.safety_level = safety_level(outcomes, spec);
  return r;
}

std::vector<CurvePoint> reward_curves(std::span<const AllocationOutcome> outcomes,
                                      CurveGrouping grouping, double step) {
  if (outcomes.empty()) throw std::invalid_argument("reward_curves: no results");
  std::map<int, std::vector<double>> buckets;
  for (const auto& o : outcomes) {
    if (grouping == CurveGrouping::HmCollective) {
      buckets[o.hm_units].push_back(o.hm_reward);
    } else {
      for (std::size_t j = 0; j < o.malicious_units.size(); ++j) {
        buckets[o.malicious_units[j]].push_back(o.malicious_rewards[j]);
      }
    }
  }
  std::vector<CurvePoint> out;
  for (const auto& [units, values] : buckets) {
    CurvePoint c;
    c.power_units = units;
    c.power = units * step;
    c.n_samples = values.size();
    for (double v : values) c.mean_reward += v;
    c.mean_reward /= static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - c.mean_reward) * (v - c.mean_reward);
      const double n = static_cast<double>(values.size());
      c.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    out.push_back(c);
  }
  return out;
}

EqualPowerScan equal_power_scan(const SweepAnalysis& analysis) {
  EqualPowerScan scan;
  scan.k = analysis.spec.n_malicious;
  scan.step = analysis.spec.step;
  const int total = analysis.spec.units();
  for (std::size_t i = 0; i < analysis.allocations.size(); ++i) {
    const auto& a = analysis.allocations[i];
    const int u = a.malicious_units.front();
    const double power = static_cast<double>(u) / total;
    bool profitable = false;
    if (analysis.spec.model == Model::Fixed) {
      profitable = all_exceed(analysis.outcomes[i].malicious_rewards, power);
    } else {
      profitable = all_sm_equilibrium_profitable(analysis.games[i], analysis.preferred[i], power);
    }
    scan.points.push_back({u, profitable});
  }
  return scan;
}

}  // namespace smarena
