#include "smarena/replicate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace smarena {

void Instance::validate() const {
  allocation.validate();
  if (strategies.size() != allocation.size()) {
    throw std::invalid_argument("strategy list length does not match the power allocation");
  }
}

SimResult aggregate(std::span<const RunOutcome> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  const std::size_t n = runs.front().reward.rewards.size();
  const auto reps = static_cast<double>(runs.size());
  SimResult out;
  out.mean_rewards.assign(n, 0.0);
  out.sem.assign(n, 0.0);
  std::size_t converged = 0;
  for (const auto& run : runs) {
    for (std::size_t i = 0; i < n; ++i) out.mean_rewards[i] += run.reward.rewards[i];
    out.steps_used.push_back(run.steps);
    if (run.converged) ++converged;
  }
  for (auto& m : out.mean_rewards) m /= reps;
  if (runs.size() > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      double ss = 0.0;
      for (const auto& run : runs) {
        const double d = run.reward.rewards[i] - out.mean_rewards[i];
        ss += d * d;
      }
      out.sem[i] = std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps);
    }
  }
  out.converged_fraction = static_cast<double>(converged) / reps;
  return out;
}

SimResult run_replicated(const PowerAllocation& allocation, std::span<const StrategyKind> strategies,
                         const SimConfig& config) {
  config.validate();
  Instance{allocation, {strategies.begin(), strategies.end()}}.validate();
  const auto reps = static_cast<std::int64_t>(config.repetitions);
  std::vector<RunOutcome> runs(static_cast<std::size_t>(reps));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t r = 0; r < reps; ++r) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    runs[static_cast<std::size_t>(r)] = run_once(allocation, strategies, config, rng);
  }
  return aggregate(runs);
}

SimResult run_replicated_serial(const PowerAllocation& allocation,
                                std::span<const StrategyKind> strategies, const SimConfig& config) {
  config.validate();
  Instance{allocation, {strategies.begin(), strategies.end()}}.validate();
  std::vector<RunOutcome> runs;
  runs.reserve(config.repetitions);
  for (std::uint32_t r = 0; r < config.repetitions; ++r) {
    Rng rng(derive_seed(config.seed, r));
    runs.push_back(run_once(allocation, strategies, config, rng));
  }
  return aggregate(runs);
}

SimResult permute_payoffs(const SimResult& canonical, std::span<const std::size_t> permutation,
                          const Instance& canonical_instance, const Instance& target) {
  const std::size_t n = canonical.size();
  if (permutation.size() != n || target.size() != n || canonical_instance.size() != n) {
    throw std::invalid_argument("permute_payoffs: size mismatch");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = permutation[i];
    if (c >= n || seen[c]) throw std::invalid_argument("permute_payoffs: not a permutation");
    seen[c] = true;
    if (target.strategies[i] != canonical_instance.strategies[c] ||
        std::abs(target.allocation.powers[i] - canonical_instance.allocation.powers[c]) > 1e-9) {
      throw std::invalid_argument(
          fmt::format("permute_payoffs: miner {} would change its (power, strategy) pair", i));
    }
  }
  SimResult out = canonical;
  for (std::size_t i = 0; i < n; ++i) {
    out.mean_rewards[i] = canonical.mean_rewards[permutation[i]];
    out.sem[i] = canonical.sem[permutation[i]];
  }
  return out;
}

CollapsedInstance collapse_hm(const PowerAllocation& allocation,
                              std::span<const StrategyKind> strategies) {
  if (strategies.size() != allocation.size()) {
    throw std::invalid_argument("collapse_hm: strategy list length does not match");
  }
  CollapsedInstance out;
  out.expansion.resize(strategies.size());
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    if (strategies[i] == StrategyKind::HM) {
      if (out.collective == kNoCollective) {
        out.collective = out.reduced.size();
        out.reduced.strategies.push_back(StrategyKind::HM);
        out.reduced.allocation.powers.push_back(0.0);
      }
      out.reduced.allocation.powers[out.collective] += allocation.powers[i];
      out.members.push_back(i);
      out.expansion[i] = out.collective;
    } else {
      out.expansion[i] = out.reduced.size();
      out.reduced.strategies.push_back(strategies[i]);
      out.reduced.allocation.powers.push_back(allocation.powers[i]);
    }
  }
  return out;
}

SimResult expand_collective(const SimResult& reduced, const CollapsedInstance& collapsed,
                            const PowerAllocation& original) {
  if (reduced.size() != collapsed.reduced.size()) {
    throw std::invalid_argument("expand_collective: result does not match the reduced instance");
  }
  const std::size_t n = collapsed.expansion.size();
  SimResult out;
  out.mean_rewards.resize(n);
  out.sem.resize(n);
  out.converged_fraction = reduced.converged_fraction;
  out.steps_used = reduced.steps_used;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = collapsed.expansion[i];
    double share = 1.0;
    if (r == collapsed.collective) {
      const double total = collapsed.reduced.allocation.powers[r];
      share = total > 0.0 ? original.powers[i] / total : 0.0;
    }
    out.mean_rewards[i] = reduced.mean_rewards[r] * share;
    out.sem[i] = reduced.sem[r] * share;
  }
  return out;
}

namespace {

double round12(double p) { return std::round(p * 1e12) / 1e12; }

}  // namespace

CanonicalForm canonicalize(const Instance& instance) {
  instance.validate();
  CanonicalForm form;
  form.collapsed = collapse_hm(instance.allocation, instance.strategies);
  const auto& reduced = form.collapsed.reduced;

  for (std::size_t i = 0; i < reduced.size(); ++i) {
    if (reduced.allocation.powers[i] > 0.0) form.source.push_back(i);
  }
  std::stable_sort(form.source.begin(), form.source.end(), [&](std::size_t a, std::size_t b) {
    const bool a_sm = reduced.strategies[a] == StrategyKind::SM;
    const bool b_sm = reduced.strategies[b] == StrategyKind::SM;
    if (a_sm != b_sm) return a_sm;
    return reduced.allocation.powers[a] > reduced.allocation.powers[b];
  });

  for (std::size_t c = 0; c < form.source.size(); ++c) {
    const std::size_t r = form.source[c];
    const double p = round12(reduced.allocation.powers[r]);
    form.instance.allocation.powers.push_back(p);
    form.instance.strategies.push_back(reduced.strategies[r]);
    if (c > 0) form.key += '|';
    form.key += fmt::format("{}:{:.12f}", to_string(reduced.strategies[r]), p);
  }
  return form;
}

std::uint64_t instance_seed(std::uint64_t master_seed, const std::string& key) {
  return derive_seed(master_seed, hash_key(key));
}

SimResult restore(const SimResult& canonical_result, const CanonicalForm& form,
                  const Instance& original) {
  const auto& reduced = form.collapsed.reduced;
  // Positive-power reduced miners, in reduced order.
  Instance present;
  std::vector<std::size_t> present_index;
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    if (reduced.allocation.powers[i] > 0.0) {
      present.allocation.powers.push_back(round12(reduced.allocation.powers[i]));
      present.strategies.push_back(reduced.strategies[i]);
      present_index.push_back(i);
    }
  }
  std::vector<std::size_t> perm(present_index.size());
  for (std::size_t c = 0; c < form.source.size(); ++c) {
    const auto it = std::find(present_index.begin(), present_index.end(), form.source[c]);
    perm[static_cast<std::size_t>(it - present_index.begin())] = c;
  }
  const SimResult ordered = permute_payoffs(canonical_result, perm, form.instance, present);

  SimResult full;
  full.mean_rewards.assign(reduced.size(), 0.0);
  full.sem.assign(reduced.size(), 0.0);
  full.converged_fraction = ordered.converged_fraction;
  full.steps_used = ordered.steps_used;
  for (std::size_t k = 0; k < present_index.size(); ++k) {
    full.mean_rewards[present_index[k]] = ordered.mean_rewards[k];
    full.sem[present_index[k]] = ordered.sem[k];
  }
  return expand_collective(full, form.collapsed, original.allocation);
}

SimResult simulate_instance(const Instance& instance, const SimConfig& config) {
  const CanonicalForm form = canonicalize(instance);
  SimConfig cfg = config;
  cfg.seed = instance_seed(config.seed, form.key);
  const SimResult canonical =
      run_replicated(form.instance.allocation, form.instance.strategies, cfg);
  return restore(canonical, form, instance);
}

}  // namespace smarena
