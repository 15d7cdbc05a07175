#ifndef SMARENA_SWEEP_HPP
#define SMARENA_SWEEP_HPP

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smarena/game.hpp"
#include "smarena/replicate.hpp"

namespace smarena {

enum class Model { Fixed, Dynamic };
std::string_view to_string(Model model);
Model parse_model(std::string_view text);

/// How a dynamic-model allocation is scored when several equilibria survive.
enum class EquilibriumAggregate { Max, Min, Mean };
std::string_view to_string(EquilibriumAggregate agg);
EquilibriumAggregate parse_aggregate(std::string_view text);

/// Grid increment by number of malicious miners: 1-3 -> 0.01, 4 -> 0.02,
/// 5-7 -> 0.04, 8-9 -> 0.05 (and 0.05 beyond).
double default_step(std::size_t n_malicious);

struct GridSpec {
  std::size_t n_malicious = 1;
  double step = 0.01;
  Model model = Model::Fixed;

  /// Number of steps in a unit of power. Throws unless step divides 1.
  [[nodiscard]] int units() const;
  void validate() const;
};

/// Malicious miners first (non-decreasing power), the HM collective last.
struct GridAllocation {
  std::size_t id = 0;
  std::vector<int> malicious_units;
  int hm_units = 0;

  [[nodiscard]] PowerAllocation to_allocation(int units) const;
};

std::vector<GridAllocation> enumerate_allocations(const GridSpec& spec);
/// k malicious miners sharing one power value each, remainder to the collective.
std::vector<GridAllocation> equal_power_allocations(std::size_t k, double step);

class IncompleteResults : public std::runtime_error {
 public:
  IncompleteResults(const std::string& what, std::vector<std::string> missing)
      : std::runtime_error(what), missing_(std::move(missing)) {}
  [[nodiscard]] const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

// ---- simulation tasks -------------------------------------------------------

struct CanonicalTask {
  std::string key;
  Instance instance;  // canonical form
};

using ResultStore = std::map<std::string, SimResult>;

/// Every fixed-strategy instance the grid needs: one per allocation in the
/// fixed model, one per strategy profile in the dynamic model.
std::vector<Instance> required_instances(const GridSpec& spec,
                                         std::span<const GridAllocation> allocations);
/// Distinct canonical instances, sorted by key.
std::vector<CanonicalTask> plan_tasks(std::span<const Instance> requests);
SimResult run_task(const CanonicalTask& task, const SimConfig& config);

using TaskCallback = std::function<void(const CanonicalTask&, const SimResult&)>;

/**
 * Runs every task missing from `store` on up to `jobs` OpenMP threads.
 * Results are inserted and `on_done` is invoked under one lock, so the
 * callback may write files without further synchronisation.
 */
void run_tasks(std::span<const CanonicalTask> tasks, const SimConfig& config, ResultStore& store,
               int jobs, const TaskCallback& on_done = {});

/// Result for an arbitrary instance via its canonical entry in the store.
SimResult lookup(const ResultStore& store, const Instance& instance);

// ---- analysis ----------------------------------------------------------------

struct AllocationOutcome {
  std::size_t allocation_id = 0;
  std::vector<int> malicious_units;
  int hm_units = 0;
  std::vector<double> malicious_rewards;
  double hm_reward = 0.0;
};

struct SweepAnalysis {
  GridSpec spec;
  std::vector<GridAllocation> allocations;
  // Dynamic model only, one entry per allocation.
  std::vector<GameTable> games;
  std::vector<EquilibriumSet> equilibria;
  std::vector<EquilibriumSet> preferred;
  /// Scored with the configured aggregate; feeds thresholds.
  std::vector<AllocationOutcome> outcomes;
  /// Mean over surviving equilibria (identical to `outcomes` in the fixed model); feeds curves.
  std::vector<AllocationOutcome> mean_outcomes;
};

struct AnalysisOptions {
  double epsilon = 1e-4;
  EquilibriumAggregate aggregate = EquilibriumAggregate::Max;
  bool hm_preference = true;
};

SweepAnalysis analyze(const GridSpec& spec, std::span<const GridAllocation> allocations,
                      const ResultStore& store, const AnalysisOptions& options);

struct Witness {
  std::size_t allocation_id = 0;
  std::size_t miner = 0;
  int power_units = 0;
  double reward = 0.0;
};

/// Grid value (in steps) or NOT_FOUND, plus the allocation behind the
/// highest violation that pushed it up.
struct BoundaryDecision {
  std::optional<int> units;
  std::optional<Witness> witness;
};

/// Least malicious power p with reward > power for every row holding any q >= p.
/// A miner holding all power cannot exceed it; such rows pass when reward is 1.
BoundaryDecision power_threshold(std::span<const AllocationOutcome> outcomes, const GridSpec& spec);
/// Least collective power with every malicious reward <= power for all q_HM >= it.
BoundaryDecision safety_level(std::span<const AllocationOutcome> outcomes, const GridSpec& spec);

struct ThresholdReport {
  std::size_t n_malicious = 0;
  Model model = Model::Fixed;
  double step = 0.0;
  BoundaryDecision power_threshold;
  BoundaryDecision safety_level;
};

ThresholdReport threshold_report(std::span<const AllocationOutcome> outcomes, const GridSpec& spec);

enum class CurveGrouping { Malicious, HmCollective };

struct CurvePoint {
  int power_units = 0;
  double power = 0.0;
  double mean_reward = 0.0;
  double sem = 0.0;
  std::size_t n_samples = 0;
};

std::vector<CurvePoint> reward_curves(std::span<const AllocationOutcome> outcomes,
                                      CurveGrouping grouping, double step);

/// Equal-power scan from an analysis of equal_power_allocations(k, step).
EqualPowerScan equal_power_scan(const SweepAnalysis& analysis);

}  // namespace smarena

#endif  // SMARENA_SWEEP_HPP
