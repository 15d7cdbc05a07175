#include <algorithm>
#include <limits>
#include <random>

#include "brute_force_pe.hpp"
#include "doctest.h"
#include "smarena/game.hpp"

using namespace smarena;

namespace {

// Game whose payoffs come from a table indexed by profile bits.
GameTable table_game(std::size_t k, const std::vector<std::vector<double>>& payoffs) {
  std::vector<double> powers(k, 1.0 / static_cast<double>(k));
  std::vector<MinerType> types(k, MinerType::StrM);
  return build_game(PowerAllocation{powers}, types, [&](const Instance& inst) {
    ProfileBits bits = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (inst.strategies[j] == StrategyKind::SM) bits |= ProfileBits{1} << j;
    }
    SimResult r;
    r.mean_rewards = payoffs[bits];
    r.sem.assign(k, 0.0);
    return r;
  });
}

oracle::Table to_oracle(const GameTable& g) {
  oracle::Table t;
  const std::size_t k = g.strategic.size();
  for (ProfileBits b = 0; b < g.profile_count(); ++b) {
    oracle::Choice c(k);
    std::vector<double> p(k);
    for (std::size_t j = 0; j < k; ++j) {
      c[j] = (b >> j) & 1u;
      p[j] = g.payoffs[b].payoff[g.strategic[j]];
    }
    t[c] = p;
  }
  return t;
}

std::vector<oracle::Choice> as_choices(const EquilibriumSet& e, std::size_t k) {
  std::vector<oracle::Choice> out;
  for (ProfileBits b : e.equilibria) {
    oracle::Choice c(k);
    for (std::size_t j = 0; j < k; ++j) c[j] = (b >> j) & 1u;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("build_game enumerates profiles of strategic miners only") {
  int calls = 0;
  PayoffSource src = [&](const Instance& inst) {
    ++calls;
    SimResult r;
    r.mean_rewards = inst.allocation.powers;
    r.sem.assign(inst.size(), 0.0);
    return r;
  };
  const PowerAllocation a{{0.2, 0.3, 0.5}};
  auto g = build_game(a, std::vector<MinerType>{MinerType::HM, MinerType::HM, MinerType::HM}, src);
  CHECK(g.profile_count() == 1);
  g = build_game(a, std::vector<MinerType>{MinerType::StrM, MinerType::HM, MinerType::HM}, src);
  CHECK(g.profile_count() == 2);
  g = build_game(a, std::vector<MinerType>{MinerType::StrM, MinerType::HM, MinerType::StrM}, src);
  CHECK(g.profile_count() == 4);
  CHECK(g.choices(0b10) == std::vector<StrategyKind>{StrategyKind::HM, StrategyKind::HM, StrategyKind::SM});
  CHECK(g.bits_string(0b10) == "01");
  CHECK(calls == 7);
}

TEST_CASE("simulated game: strong StrM prefers SM") {
  SimConfig c = SimConfig::desk_scale();
  c.seed = 21;
  const auto g = build_game(PowerAllocation{{0.45, 0.55}}, std::vector<MinerType>{MinerType::StrM, MinerType::HM}, c);
  CHECK(g.payoffs[1].payoff[0] > g.payoffs[0].payoff[0]);
  const auto eq = epsilon_pe(g, 1e-4);
  CHECK(eq.equilibria == std::vector<ProfileBits>{1});
  const auto all_hm = build_game(PowerAllocation{{0.3, 0.7}}, std::vector<MinerType>{MinerType::HM, MinerType::HM}, c);
  CHECK(all_hm.payoffs[0].payoff[0] == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("epsilon_pe examples") {
  // Single StrM: HM -> 0.40, SM -> 0.30.
  auto g = table_game(1, {{0.40}, {0.30}});
  CHECK(epsilon_pe(g, 1e-4).equilibria == std::vector<ProfileBits>{0});
  // Within epsilon both ways.
  g = table_game(1, {{0.30000}, {0.30005}});
  CHECK(epsilon_pe(g, 1e-4).equilibria == std::vector<ProfileBits>{0, 1});
  CHECK(epsilon_pe(g, 0.0).equilibria == std::vector<ProfileBits>{1});
  CHECK(epsilon_pe(g, std::numeric_limits<double>::infinity()).equilibria.size() == 2);
}

TEST_CASE("HM-preference filter") {
  auto g = table_game(1, {{0.3}, {0.3}});
  const auto eq = epsilon_pe(g, 1e-4);
  const auto f = hm_preference_filter(eq, g);
  CHECK(f.equilibria == std::vector<ProfileBits>{0});
  CHECK(f.hm_preferred);

  // Equilibria 01 and 10 differ in two coordinates: both kept.
  g = table_game(2, {{0.1, 0.1}, {0.5, 0.4}, {0.4, 0.5}, {0.2, 0.2}});
  const auto e2 = epsilon_pe(g, 1e-4);
  CHECK(e2.equilibria == std::vector<ProfileBits>{1, 2});
  CHECK(hm_preference_filter(e2, g).equilibria == e2.equilibria);
}

TEST_CASE("randomized tables: brute force agreement, filter idempotence, relabeling") {
  std::mt19937_64 gen(42);
  std::uniform_int_distribution<int> level(0, 6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + trial % 4;
    std::vector<std::vector<double>> pay(std::size_t{1} << k, std::vector<double>(k));
    // Coarse levels make ties and near-epsilon gaps common.
    for (auto& row : pay) {
      for (auto& v : row) v = level(gen) * 5e-5;
    }
    const auto g = table_game(k, pay);
    const double eps = 1e-4;
    const auto eq = epsilon_pe(g, eps);
    CHECK(as_choices(eq, k) == oracle::brute_force_pe(to_oracle(g), eps));

    const auto f = hm_preference_filter(eq, g);
    CHECK(hm_preference_filter(f, g).equilibria == f.equilibria);
    if (!eq.equilibria.empty()) CHECK_FALSE(f.equilibria.empty());

    // Reverse miner labels together with payoffs.
    std::vector<std::vector<double>> rev(pay.size(), std::vector<double>(k));
    auto flip = [k](ProfileBits b) {
      ProfileBits r = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (b & (ProfileBits{1} << j)) r |= ProfileBits{1} << (k - 1 - j);
      }
      return r;
    };
    for (ProfileBits b = 0; b < pay.size(); ++b) {
      for (std::size_t j = 0; j < k; ++j) rev[flip(b)][k - 1 - j] = pay[b][j];
    }
    std::vector<ProfileBits> mapped;
    for (ProfileBits b : epsilon_pe(table_game(k, rev), eps).equilibria) mapped.push_back(flip(b));
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == eq.equilibria);
  }
}

TEST_CASE("multi_sm_ranges") {
  EqualPowerScan two{2, 0.01, {}};
  for (int u = 0; u <= 50; ++u) two.points.push_back({u, (u >= 20 && u <= 30) || u == 40});
  EqualPowerScan three{3, 0.01, {}};
  for (int u = 0; u <= 33; ++u) three.points.push_back({u, u >= 24 && u <= 27});
  EqualPowerScan one{1, 0.01, {{40, true}}};
  EqualPowerScan none{4, 0.02, {{1, false}}};
  const std::vector<EqualPowerScan> scans{one, two, three, none};
  const auto r = multi_sm_ranges(scans);
  REQUIRE(r.size() == 2);
  CHECK(r[0].k == 2);
  CHECK(r[0].lo_units == 20);
  CHECK(r[0].hi_units == 30);
  CHECK(r[1].width_units() < r[0].width_units());
  CHECK(all_exceed(std::vector<double>{0.2, 0.21}, 0.19));
  CHECK_FALSE(all_exceed(std::vector<double>{0.2, 0.19}, 0.19));
}
