#ifndef SMARENA_SIMULATOR_HPP
#define SMARENA_SIMULATOR_HPP

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "smarena/block_tree.hpp"
#include "smarena/rng.hpp"
#include "smarena/strategy.hpp"

namespace smarena {

inline constexpr double kPowerSumTolerance = 1e-9;

struct PowerAllocation {
  std::vector<double> powers;

  [[nodiscard]] std::size_t size() const { return powers.size(); }
  /// Throws std::invalid_argument unless every power is in [0,1] and they sum to 1.
  void validate() const;
};

struct SimConfig {
  double alpha = 1e-4;
  std::uint64_t step_cap = 200000;
  std::uint32_t repetitions = 100;
  std::uint64_t seed = 0;
  std::uint64_t window = 10000;  // measured timesteps

  static SimConfig desk_scale();
  void validate() const;
};

/**
 * Tracks per-miner min/max utility over the trailing `window` measurements.
 * Converged once the window is full and every miner's range is <= alpha.
 */
class ConvergenceWindow {
 public:
  ConvergenceWindow(std::size_t n_miners, std::uint64_t window, double alpha);

  void push(std::span<const double> utilities);
  [[nodiscard]] bool converged() const;
  [[nodiscard]] std::uint64_t count() const { return count_; }

 private:
  struct Entry {
    std::uint64_t index;
    double value;
  };
  std::uint64_t window_;
  double alpha_;
  std::uint64_t count_ = 0;
  std::vector<std::deque<Entry>> max_;
  std::vector<std::deque<Entry>> min_;
};

/**
 * One run of the fixed-strategy mining chain.
 *
 * Each timestep one miner, drawn with probability equal to its power, mines
 * on its current target. Broadcasts from that step (including publications
 * triggered by deliveries) sit in one queue and are taken out in uniformly
 * random order; each broadcast reaches every other miner at once.
 *
 * Utilities are measured on the longest chain of the whole tree, withheld
 * branches included, and only at timesteps where that chain is unique.
 */
class Simulation {
 public:
  struct Broadcast {
    MinerId sender;
    std::uint32_t begin;
    std::uint32_t count;
  };

  Simulation(const PowerAllocation& allocation, std::span<const StrategyKind> strategies);

  void reserve(std::size_t blocks) { tree_.reserve(blocks); public_.reserve(blocks); }

  [[nodiscard]] MinerId sample_miner(Rng& rng) const;
  void step(Rng& rng) { advance(sample_miner(rng), rng); }
  /// Runs one timestep with a given discoverer. `rng` orders the broadcast queue.
  void advance(MinerId discoverer, Rng& rng);

  [[nodiscard]] std::size_t n_miners() const { return miners_.size(); }
  [[nodiscard]] std::uint64_t timestep() const { return timestep_; }
  [[nodiscard]] const BlockTree& tree() const { return tree_; }
  [[nodiscard]] const MinerAutomaton& miner(MinerId i) const { return miners_[i]; }
  [[nodiscard]] bool is_public(BlockId id) const { return public_[id] != 0; }

  /// Broadcasts of the last timestep in processing order.
  [[nodiscard]] std::span<const Broadcast> last_broadcasts() const { return processed_; }
  [[nodiscard]] std::span<const BlockId> broadcast_blocks(const Broadcast& b) const {
    return {pool_.data() + b.begin, b.count};
  }

  /// Longest published tips, in the order they were processed.
  [[nodiscard]] std::span<const BlockId> longest_public_tips() const { return best_public_; }
  [[nodiscard]] bool unique_longest_public() const { return best_public_.size() == 1; }
  /// Blocks of maximal height in the whole tree, in creation order.
  [[nodiscard]] std::span<const BlockId> longest_tips() const { return best_all_; }
  /// True when the last timestep ended with a unique longest chain.
  [[nodiscard]] bool measured_last_step() const { return measured_last_; }

  /// Utilities on the last measured chain; all zero before the first measurement.
  [[nodiscard]] std::span<const double> utilities() const { return utilities_; }

  /**
   * Reward at the end of a run. A persisting tie between published tips is
   * broken by processing order (first processed wins); otherwise the
   * earliest-created tip wins.
   */
  [[nodiscard]] RewardVector final_reward();

 private:
  void enqueue(MinerId sender, std::span<const BlockId> blocks);
  void measure_at(BlockId tip);

  BlockTree tree_;
  std::vector<MinerAutomaton> miners_;
  std::vector<double> cumulative_;
  std::vector<std::uint8_t> public_;

  std::vector<BlockId> pool_;
  std::vector<Broadcast> pending_;
  std::vector<Broadcast> processed_;
  std::vector<BlockId> scratch_;

  std::vector<BlockId> best_public_;
  std::uint32_t best_public_height_ = 0;
  std::vector<BlockId> best_all_;

  BlockId measured_tip_ = kGenesis;
  std::vector<std::uint64_t> counts_;
  std::uint64_t counted_ = 0;
  std::vector<double> utilities_;
  bool measured_last_ = false;
  std::uint64_t timestep_ = 0;
};

struct RunOutcome {
  RewardVector reward;
  std::uint64_t steps = 0;
  bool converged = false;
};

/// Steps until convergence or the cap; deterministic given the rng state.
RunOutcome run_once(const PowerAllocation& allocation, std::span<const StrategyKind> strategies,
                    const SimConfig& config, Rng& rng);

}  // namespace smarena

#endif  // SMARENA_SIMULATOR_HPP
