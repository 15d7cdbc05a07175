#ifndef SMARENA_STRATEGY_HPP
#define SMARENA_STRATEGY_HPP

#include <cstdint>
#include <deque>
#include <string_view>
#include <variant>
#include <vector>

#include "smarena/block_tree.hpp"

namespace smarena {

enum class StrategyKind : std::uint8_t { HM, SM };

std::string_view to_string(StrategyKind kind);
/// Accepts "HM"/"SM" case-insensitively; throws std::invalid_argument otherwise.
StrategyKind parse_strategy(std::string_view text);

struct PublishAction {
  std::vector<BlockId> blocks_to_broadcast;  // parent before child
  BlockId new_mining_target = kGenesis;
};

struct MiningEvent {
  enum class Kind : std::uint8_t { Mined, Delivered };
  Kind kind;
  BlockId block;
};

/// Honest miner: mines on the first-received tip of maximal height.
struct HonestView {
  BlockId head = kGenesis;
};

/**
 * Selfish miner state.
 *
 * `private_blocks` holds the hidden suffix of the miner's branch, oldest
 * first, ending at `private_head` when nonempty. `public_head` is the
 * deepest published block this miner knows of (its own published blocks
 * included), first-received among equals.
 */
struct SelfishView {
  BlockId private_head = kGenesis;
  BlockId public_head = kGenesis;
  std::deque<BlockId> private_blocks;

  [[nodiscard]] std::int64_t lead(const BlockTree& tree) const {
    return static_cast<std::int64_t>(tree.height(private_head)) -
           static_cast<std::int64_t>(tree.height(public_head));
  }
  /// Last published ancestor of the hidden branch.
  [[nodiscard]] BlockId fork_point(const BlockTree& tree) const {
    return private_blocks.empty() ? private_head : tree.parent(private_blocks.front());
  }
  /// Own published block tied with a competing public block of equal height.
  [[nodiscard]] bool in_race(const BlockTree& tree) const {
    return private_blocks.empty() && private_head != public_head &&
           tree.height(private_head) == tree.height(public_head);
  }
};

PublishAction hm_on_event(HonestView& view, const BlockTree& tree, MiningEvent event);
PublishAction sm_on_self_mined(SelfishView& view, const BlockTree& tree, BlockId new_block);
PublishAction sm_on_external_block(SelfishView& view, const BlockTree& tree, BlockId delivered);

// Allocation-free forms used by the simulation loop: broadcasts are appended
// to `out`, the return value is the new mining target.
BlockId hm_on_mined(HonestView& view, BlockId block, std::vector<BlockId>& out);
BlockId hm_on_delivered(HonestView& view, const BlockTree& tree, BlockId block);
BlockId sm_on_self_mined(SelfishView& view, const BlockTree& tree, BlockId new_block,
                         std::vector<BlockId>& out);
BlockId sm_on_external_block(SelfishView& view, const BlockTree& tree, BlockId delivered,
                             std::vector<BlockId>& out);

/// A miner of either kind, dispatched by value.
class MinerAutomaton {
 public:
  explicit MinerAutomaton(StrategyKind kind);

  [[nodiscard]] StrategyKind kind() const;
  [[nodiscard]] BlockId target() const;
  [[nodiscard]] const HonestView* honest() const { return std::get_if<HonestView>(&view_); }
  [[nodiscard]] const SelfishView* selfish() const { return std::get_if<SelfishView>(&view_); }

  void on_mined(const BlockTree& tree, BlockId block, std::vector<BlockId>& out);
  void on_delivered(const BlockTree& tree, BlockId block, std::vector<BlockId>& out);

 private:
  std::variant<HonestView, SelfishView> view_;
};

}  // namespace smarena

#endif  // SMARENA_STRATEGY_HPP
