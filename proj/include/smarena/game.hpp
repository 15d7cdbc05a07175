#ifndef SMARENA_GAME_HPP
#define SMARENA_GAME_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smarena/replicate.hpp"

namespace smarena {

enum class MinerType : std::uint8_t { HM, StrM };

std::string_view to_string(MinerType type);
MinerType parse_miner_type(std::string_view text);

/// Profiles are addressed by a bit mask over the strategic miners: bit j set
/// means the j-th StrM (in miner order) plays SM.
using ProfileBits = std::uint32_t;

struct ProfilePayoff {
  std::vector<StrategyKind> choices;
  std::vector<double> payoff;
  std::vector<double> sem;
};

struct GameTable {
  PowerAllocation allocation;
  std::vector<MinerType> types;
  std::vector<std::size_t> strategic;  // miner index of each StrM, in order
  std::vector<ProfilePayoff> payoffs;  // indexed by ProfileBits

  [[nodiscard]] std::size_t n_miners() const { return types.size(); }
  [[nodiscard]] std::size_t profile_count() const { return payoffs.size(); }
  [[nodiscard]] std::vector<StrategyKind> choices(ProfileBits bits) const;
  /// One character per StrM, '1' = SM, first StrM first.
  [[nodiscard]] std::string bits_string(ProfileBits bits) const;
};

using PayoffSource = std::function<SimResult(const Instance&)>;

/// One payoff evaluation per profile in the product of available strategies.
GameTable build_game(const PowerAllocation& allocation, std::span<const MinerType> types,
                     const PayoffSource& source);
/// Evaluates profiles with simulate_instance(instance, config).
GameTable build_game(const PowerAllocation& allocation, std::span<const MinerType> types,
                     const SimConfig& config);

struct EquilibriumSet {
  std::vector<ProfileBits> equilibria;  // ascending
  double epsilon = 0.0;
  bool hm_preferred = false;
};

/// Every profile from which no strategic miner gains more than epsilon by a
/// unilateral switch. Uses mean payoffs only.
EquilibriumSet epsilon_pe(const GameTable& game, double epsilon);

/// Drops every equilibrium that has a partner equilibrium differing only in
/// one miner's choice, where that miner plays HM in the partner. All pairs are
/// judged against the input set, so the result is order-free and idempotent.
EquilibriumSet hm_preference_filter(const EquilibriumSet& eqs, const GameTable& game);

/// Equal-power scan point: k malicious miners each holding `power_units` steps.
struct EqualPowerPoint {
  int power_units = 0;
  bool all_profitable = false;
};

struct EqualPowerScan {
  std::size_t k = 0;
  double step = 0.0;
  std::vector<EqualPowerPoint> points;
};

struct MultiSmRange {
  std::size_t k = 0;
  int lo_units = 0;
  int hi_units = 0;
  double step = 0.0;

  [[nodiscard]] double lo() const { return lo_units * step; }
  [[nodiscard]] double hi() const { return hi_units * step; }
  [[nodiscard]] int width_units() const { return hi_units - lo_units; }
};

/// Fixed model: every malicious reward strictly exceeds its power.
bool all_exceed(std::span<const double> rewards, double power);
/// Dynamic model: some surviving equilibrium has every StrM playing SM with a
/// payoff strictly above `power`.
bool all_sm_equilibrium_profitable(const GameTable& game, const EquilibriumSet& eqs, double power);

/// Longest contiguous run of profitable grid points per scan with k >= 2
/// (lowest run on ties). Scans without a profitable point are omitted.
std::vector<MultiSmRange> multi_sm_ranges(std::span<const EqualPowerScan> scans);

}  // namespace smarena

#endif  // SMARENA_GAME_HPP
