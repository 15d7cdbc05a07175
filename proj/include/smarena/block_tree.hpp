#ifndef SMARENA_BLOCK_TREE_HPP
#define SMARENA_BLOCK_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace smarena {

using BlockId = std::uint32_t;
using MinerId = std::uint32_t;

inline constexpr BlockId kGenesis = 0;
inline constexpr BlockId kNoBlock = std::numeric_limits<BlockId>::max();
inline constexpr MinerId kNobody = std::numeric_limits<MinerId>::max();

/// Raised when the simulator asks the tree for something that cannot exist
/// (unknown parent, unknown tip). Always a programming error, never a model event.
class StructuralError : public std::logic_error {
 public:
  explicit StructuralError(const std::string& what) : std::logic_error(what) {}
};

struct Block {
  BlockId id;
  BlockId parent;  // kNoBlock for genesis
  MinerId owner;   // kNobody for genesis
  std::uint32_t height;
};

/**
 * Append-only block tree rooted at an unowned genesis block.
 *
 * Block ids are insertion indices, so a fixed sequence of extend() calls
 * always produces the same ids. Blocks are never removed; a branch that
 * loses the longest-chain race simply stops growing.
 */
class BlockTree {
 public:
  BlockTree();

  BlockId extend(BlockId parent, MinerId owner);
  void reserve(std::size_t n);

  [[nodiscard]] bool contains(BlockId id) const { return id < parent_.size(); }
  [[nodiscard]] std::size_t size() const { return parent_.size(); }

  [[nodiscard]] Block block(BlockId id) const;
  // Unchecked accessors for the hot simulation loop.
  [[nodiscard]] BlockId parent(BlockId id) const { return parent_[id]; }
  [[nodiscard]] MinerId owner(BlockId id) const { return owner_[id]; }
  [[nodiscard]] std::uint32_t height(BlockId id) const { return height_[id]; }

  [[nodiscard]] std::uint32_t max_height() const { return max_height_; }

  /// Leaf blocks in id order.
  [[nodiscard]] std::vector<BlockId> tips() const;
  /// All leaves of maximal height, in id order. Never empty.
  [[nodiscard]] std::vector<BlockId> longest_tips() const;

  [[nodiscard]] bool is_ancestor(BlockId ancestor, BlockId descendant) const;
  [[nodiscard]] BlockId common_ancestor(BlockId a, BlockId b) const;

  /// `id parent owner height` per line, genesis first. Genesis prints parent
  /// and owner as `-`.
  void dump(std::ostream& os) const;

 private:
  void check(BlockId id, const char* what) const;

  std::vector<BlockId> parent_;
  std::vector<MinerId> owner_;
  std::vector<std::uint32_t> height_;
  std::vector<std::uint32_t> child_count_;
  std::uint32_t max_height_ = 0;
};

struct RewardVector {
  std::vector<double> rewards;
  std::vector<std::uint64_t> block_counts;

  [[nodiscard]] std::uint64_t total_blocks() const;
};

/// Reward vector from per-miner block counts; all zeros when no block is counted.
RewardVector make_reward(std::vector<std::uint64_t> counts);

/// Counts owned blocks on the genesis->tip path (genesis excluded).
RewardVector reward(const BlockTree& tree, BlockId tip, std::size_t n_miners);

}  // namespace smarena

#endif  // SMARENA_BLOCK_TREE_HPP
