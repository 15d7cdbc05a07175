#ifndef SMARENA_REPLICATE_HPP
#define SMARENA_REPLICATE_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "smarena/simulator.hpp"

namespace smarena {

/// A fully specified fixed-strategy system: who mines with what power and how.
struct Instance {
  PowerAllocation allocation;
  std::vector<StrategyKind> strategies;

  [[nodiscard]] std::size_t size() const { return strategies.size(); }
  void validate() const;
};

struct SimResult {
  std::vector<double> mean_rewards;
  std::vector<double> sem;
  double converged_fraction = 0.0;
  std::vector<std::uint64_t> steps_used;

  [[nodiscard]] std::size_t size() const { return mean_rewards.size(); }
};

/// Means and standard errors over repetitions, accumulated in repetition order.
SimResult aggregate(std::span<const RunOutcome> runs);

/// Repetition r uses the stream derive_seed(config.seed, r). Repetitions run
/// on OpenMP threads; the result does not depend on the thread count.
SimResult run_replicated(const PowerAllocation& allocation, std::span<const StrategyKind> strategies,
                         const SimConfig& config);
/// Same contract, plain loop. Kept as the reference the parallel path is checked against.
SimResult run_replicated_serial(const PowerAllocation& allocation,
                                std::span<const StrategyKind> strategies, const SimConfig& config);

/**
 * Reorders a result computed for `canonical` so that it describes `target`.
 * permutation[i] is the canonical index of target miner i. Rejects any
 * permutation that does not map each target (power, strategy) pair onto an
 * identical canonical pair.
 */
SimResult permute_payoffs(const SimResult& canonical, std::span<const std::size_t> permutation,
                          const Instance& canonical_instance, const Instance& target);

inline constexpr std::size_t kNoCollective = std::numeric_limits<std::size_t>::max();

struct CollapsedInstance {
  Instance reduced;
  std::vector<std::size_t> expansion;  // original index -> reduced index
  std::size_t collective = kNoCollective;
  std::vector<std::size_t> members;  // original indices merged into the collective
};

/// Merges every HM miner into one HM miner holding their summed power, placed
/// at the position of the first HM miner.
CollapsedInstance collapse_hm(const PowerAllocation& allocation,
                              std::span<const StrategyKind> strategies);

/// Splits the collective's reward among its members in proportion to power.
SimResult expand_collective(const SimResult& reduced, const CollapsedInstance& collapsed,
                            const PowerAllocation& original);

/**
 * Canonical simulation instance: HM collapsed, zero-power miners removed, SM
 * miners by decreasing power, collective last. Two instances with equal keys
 * are the same system up to relabeling.
 */
struct CanonicalForm {
  CollapsedInstance collapsed;
  Instance instance;
  std::vector<std::size_t> source;  // canonical index -> reduced index
  std::string key;
};

CanonicalForm canonicalize(const Instance& instance);
std::uint64_t instance_seed(std::uint64_t master_seed, const std::string& key);
/// Maps a canonical result back onto the original miner order.
SimResult restore(const SimResult& canonical_result, const CanonicalForm& form,
                  const Instance& original);
/// canonicalize + run_replicated with instance_seed + restore.
SimResult simulate_instance(const Instance& instance, const SimConfig& config);

}  // namespace smarena

#endif  // SMARENA_REPLICATE_HPP
