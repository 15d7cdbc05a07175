#include <string>

#include "doctest.h"
#include "es_reference.hpp"
#include "smarena/simulator.hpp"
#include "smarena/strategy.hpp"

using namespace smarena;

TEST_CASE("HM examples") {
  BlockTree t;
  BlockId tip = kGenesis;
  for (int i = 0; i < 3; ++i) tip = t.extend(tip, 1);
  HonestView v{tip};

  const BlockId mine = t.extend(tip, 0);
  auto act = hm_on_event(v, t, {MiningEvent::Kind::Mined, mine});
  CHECK(act.blocks_to_broadcast == std::vector<BlockId>{mine});
  CHECK(v.head == mine);

  const BlockId rival = t.extend(tip, 1);  // height 4 as well
  act = hm_on_event(v, t, {MiningEvent::Kind::Delivered, rival});
  CHECK(act.blocks_to_broadcast.empty());
  CHECK(v.head == mine);

  const BlockId r5 = t.extend(rival, 1);
  const BlockId r6 = t.extend(r5, 1);
  act = hm_on_event(v, t, {MiningEvent::Kind::Delivered, r6});
  CHECK(v.head == r6);
  CHECK(act.new_mining_target == r6);
}

TEST_CASE("SM self-mined examples") {
  BlockTree t;
  SelfishView v;
  const BlockId a = t.extend(kGenesis, 0);
  auto act = sm_on_self_mined(v, t, a);
  CHECK(act.blocks_to_broadcast.empty());
  CHECK(v.lead(t) == 1);

  const BlockId b = t.extend(a, 0);
  sm_on_self_mined(v, t, b);
  const BlockId c = t.extend(b, 0);
  act = sm_on_self_mined(v, t, c);
  CHECK(act.blocks_to_broadcast.empty());
  CHECK(v.lead(t) == 3);
  CHECK(v.private_blocks.size() == 3);
  CHECK(v.fork_point(t) == kGenesis);

  const BlockId stray = t.extend(kGenesis, 0);
  CHECK_THROWS_AS(sm_on_self_mined(v, t, stray), StructuralError);
}

TEST_CASE("SM race: mining while tied publishes and wins") {
  BlockTree t;
  SelfishView v;
  const BlockId s1 = t.extend(kGenesis, 0);
  sm_on_self_mined(v, t, s1);
  const BlockId h1 = t.extend(kGenesis, 1);
  auto act = sm_on_external_block(v, t, h1);
  CHECK(act.blocks_to_broadcast == std::vector<BlockId>{s1});
  CHECK(v.in_race(t));
  CHECK(v.lead(t) == 0);

  const BlockId s2 = t.extend(s1, 0);
  act = sm_on_self_mined(v, t, s2);
  CHECK(act.blocks_to_broadcast == std::vector<BlockId>{s2});
  CHECK(v.public_head == s2);
  CHECK(t.longest_tips() == std::vector<BlockId>{s2});
  CHECK_FALSE(v.in_race(t));
}

TEST_CASE("SM external block examples") {
  SUBCASE("lead 2 -> 1 publishes everything") {
    BlockTree t;
    SelfishView v;
    const BlockId a = t.extend(kGenesis, 0);
    sm_on_self_mined(v, t, a);
    const BlockId b = t.extend(a, 0);
    sm_on_self_mined(v, t, b);
    const BlockId h = t.extend(kGenesis, 1);
    const auto act = sm_on_external_block(v, t, h);
    CHECK(act.blocks_to_broadcast == std::vector<BlockId>{a, b});
    CHECK(v.private_blocks.empty());
    CHECK(v.public_head == b);
  }
  SUBCASE("lead 3 -> 2 releases the oldest hidden block") {
    BlockTree t;
    SelfishView v;
    BlockId tip = kGenesis;
    std::vector<BlockId> mine;
    for (int i = 0; i < 3; ++i) {
      tip = t.extend(tip, 0);
      mine.push_back(tip);
      sm_on_self_mined(v, t, tip);
    }
    const BlockId h = t.extend(kGenesis, 1);
    const auto act = sm_on_external_block(v, t, h);
    CHECK(act.blocks_to_broadcast == std::vector<BlockId>{mine[0]});
    CHECK(v.lead(t) == 2);
  }
  SUBCASE("empty branch adopts") {
    BlockTree t;
    SelfishView v;
    const BlockId h = t.extend(kGenesis, 1);
    const auto act = sm_on_external_block(v, t, h);
    CHECK(act.blocks_to_broadcast.empty());
    CHECK(v.private_head == h);
    CHECK(v.lead(t) == 0);
  }
  SUBCASE("longer public chain abandons the branch") {
    BlockTree t;
    SelfishView v;
    const BlockId a = t.extend(kGenesis, 0);
    sm_on_self_mined(v, t, a);
    const BlockId h1 = t.extend(kGenesis, 1);
    const BlockId h2 = t.extend(h1, 1);
    const auto act = sm_on_external_block(v, t, h2);
    CHECK(act.blocks_to_broadcast.empty());
    CHECK(v.private_blocks.empty());
    CHECK(v.private_head == h2);
  }
  SUBCASE("block not above the known public head is ignored") {
    BlockTree t;
    SelfishView v;
    const BlockId h1 = t.extend(kGenesis, 1);
    sm_on_external_block(v, t, h1);
    const BlockId other = t.extend(kGenesis, 2);
    const auto act = sm_on_external_block(v, t, other);
    CHECK(act.blocks_to_broadcast.empty());
    CHECK(v.public_head == h1);
  }
}

namespace {

struct Replay {
  bool ok = true;
  std::string where;
};

// Plays an S/H string through the simulator (miner 0 = SM, miner 1 = HM)
// and the reference automaton side by side.
Replay compare(const std::string& events) {
  const PowerAllocation alloc{{0.5, 0.5}};
  const std::vector<StrategyKind> kinds{StrategyKind::SM, StrategyKind::HM};
  Simulation sim(alloc, kinds);
  Rng rng(1);
  oracle::EsState ref;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto tr = oracle::es_step(ref, events[k]);
    sim.advance(events[k] == 'S' ? 0 : 1, rng);
    int published = 0;
    for (const auto& b : sim.last_broadcasts()) {
      if (b.sender == 0) published += static_cast<int>(b.count);
    }
    const SelfishView& v = *sim.miner(0).selfish();
    const bool race = v.in_race(sim.tree());
    const auto lead = v.lead(sim.tree());
    if (race != tr.next.race || lead != tr.next.lead || published != tr.published) {
      return {false, events.substr(0, k + 1)};
    }
    // HM never holds an unpublished block of its own.
    const BlockId head = sim.miner(1).honest()->head;
    if (sim.tree().owner(head) == 1 && !sim.is_public(head)) return {false, "hm hidden " + events};
    ref = tr.next;
  }
  return {};
}

}  // namespace

TEST_CASE("two-miner decisions match the reference automaton on every string up to length 12") {
  std::size_t checked = 0;
  for (int len = 1; len <= 12; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      std::string s;
      for (int i = 0; i < len; ++i) s.push_back((mask >> i) & 1u ? 'S' : 'H');
      const Replay r = compare(s);
      if (!r.ok) {
        FAIL("diverged at " << r.where);
      }
      ++checked;
    }
  }
  CHECK(checked == 8190);
}

TEST_CASE("SM never broadcasts a block twice") {
  const PowerAllocation alloc{{0.3, 0.25, 0.45}};
  const std::vector<StrategyKind> kinds{StrategyKind::SM, StrategyKind::SM, StrategyKind::HM};
  Simulation sim(alloc, kinds);
  Rng rng(99);
  std::vector<int> seen;
  for (int i = 0; i < 20000; ++i) {
    sim.step(rng);
    seen.resize(sim.tree().size(), 0);
    for (const auto& b : sim.last_broadcasts()) {
      for (BlockId id : sim.broadcast_blocks(b)) {
        REQUIRE(seen[id] == 0);
        seen[id] = 1;
        CHECK(sim.tree().owner(id) == b.sender);
      }
    }
    for (MinerId m = 0; m < 2; ++m) CHECK(sim.miner(m).selfish()->lead(sim.tree()) >= 0);
  }
}
