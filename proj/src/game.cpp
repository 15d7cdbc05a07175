#include "smarena/game.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace smarena {

std::string_view to_string(MinerType type) { return type == MinerType::HM ? "HM" : "StrM"; }

MinerType parse_miner_type(std::string_view text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "hm") return MinerType::HM;
  if (lower == "strm") return MinerType::StrM;
  throw std::invalid_argument("unknown miner type '" + std::string(text) + "' (expected HM or StrM)");
}

std::vector<StrategyKind> GameTable::choices(ProfileBits bits) const {
  std::vector<StrategyKind> out(types.size(), StrategyKind::HM);
  for (std::size_t j = 0; j < strategic.size(); ++j) {
    if (bits & (ProfileBits{1} << j)) out[strategic[j]] = StrategyKind::SM;
  }
  return out;
}

std::string GameTable::bits_string(ProfileBits bits) const {
  std::string s;
  for (std::size_t j = 0; j < strategic.size(); ++j) {
    s.push_back((bits & (ProfileBits{1} << j)) ? '1' : '0');
  }
  return s;
}

GameTable build_game(const PowerAllocation& allocation, std::span<const MinerType> types,
                     const PayoffSource& source) {
  allocation.validate();
  if (types.size() != allocation.size()) {
    throw std::invalid_argument("build_game: type list length does not match the allocation");
  }
  GameTable game;
  game.allocation = allocation;
  game.types.assign(types.begin(), types.end());
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i] == MinerType::StrM) game.strategic.push_back(i);
  }
  if (game.strategic.size() > 24) throw std::invalid_argument("build_game: too many strategic miners");

  const std::size_t profiles = std::size_t{1} << game.strategic.size();
  game.payoffs.reserve(profiles);
  for (std::size_t bits = 0; bits < profiles; ++bits) {
    Instance inst{allocation, game.choices(static_cast<ProfileBits>(bits))};
    SimResult r = source(inst);
    game.payoffs.push_back({std::move(inst.strategies), std::move(r.mean_rewards), std::move(r.sem)});
  }
  return game;
}

GameTable build_game(const PowerAllocation& allocation, std::span<const MinerType> types,
                     const SimConfig& config) {
  return build_game(allocation, types,
                    [&config](const Instance& inst) { return simulate_instance(inst, config); });
}

EquilibriumSet epsilon_pe(const GameTable& game, double epsilon) {
  EquilibriumSet out;
  out.epsilon = epsilon;
  const auto profiles = static_cast<ProfileBits>(game.profile_count());
  for (ProfileBits bits = 0; bits < profiles; ++bits) {
    const auto& here = game.payoffs[bits].payoff;
    bool stable = true;
    for (std::size_t j = 0; j < game.strategic.size() && stable; ++j) {
      const std::size_t i = game.strategic[j];
      const auto& there = game.payoffs[bits ^ (ProfileBits{1} << j)].payoff;
      if (here[i] < there[i] - epsilon) stable = false;
    }
    if (stable) out.equilibria.push_back(bits);
  }
  return out;
}

EquilibriumSet hm_preference_filter(const EquilibriumSet& eqs, const GameTable& game) {
  EquilibriumSet out;
  out.epsilon = eqs.epsilon;
  out.hm_preferred = true;
  const auto& in = eqs.equilibria;
  for (ProfileBits bits : in) {
    bool dominated = false;
    for (std::size_t j = 0; j < game.strategic.size() && !dominated; ++j) {
      const ProfileBits bit = ProfileBits{1} << j;
      if ((bits & bit) && std::find(in.begin(), in.end(), bits ^ bit) != in.end()) dominated = true;
    }
    if (!dominated) out.equilibria.push_back(bits);
  }
  return out;
}

bool all_exceed(std::span<const double> rewards, double power) {
  if (rewards.empty()) return false;
  return std::all_of(rewards.begin(), rewards.end(), [power](double r) { return r > power; });
}

bool all_sm_equilibrium_profitable(const GameTable& game, const EquilibriumSet& eqs, double power) {
  if (game.strategic.empty()) return false;
  const ProfileBits all_sm = static_cast<ProfileBits>(game.profile_count() - 1);
  if (std::find(eqs.equilibria.begin(), eqs.equilibria.end(), all_sm) == eqs.equilibria.end()) {
    return false;
  }
  const auto& payoff = game.payoffs[all_sm].payoff;
  return std::all_of(game.strategic.begin(), game.strategic.end(),
                     [&](std::size_t i) { return payoff[i] > power; });
}

std::vector<MultiSmRange> multi_sm_ranges(std::span<const EqualPowerScan> scans) {
  std::vector<MultiSmRange> out;
  for (const auto& scan : scans) {
    if (scan.k < 2) continue;
    auto points = scan.points;
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.power_units < b.power_units; });
    bool found = false;
    MultiSmRange best{scan.k, 0, 0, scan.step};
    std::size_t i = 0;
    while (i < points.size()) {
      if (!points[i].all_profitable) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < points.size() && points[j + 1].all_profitable &&
             points[j + 1].power_units == points[j].power_units + 1) {
        ++j;
      }
      const int width = points[j].power_units - points[i].power_units;
      if (!found || width > best.width_units()) {
        best.lo_units = points[i].power_units;
        best.hi_units = points[j].power_units;
        found = true;
      }
      i = j + 1;
    }
    if (found) out.push_back(best);
  }
  return out;
}

}  // namespace smarena
