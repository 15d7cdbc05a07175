#include "smarena/block_tree.hpp"

#include <ostream>
#include <utility>

namespace smarena {

BlockTree::BlockTree() {
  parent_.push_back(kNoBlock);
  owner_.push_back(kNobody);
  height_.push_back(0);
  child_count_.push_back(0);
}

void BlockTree::check(BlockId id, const char* what) const {
  if (!contains(id)) {
    throw StructuralError(std::string(what) + ": unknown block " + std::to_string(id));
  }
}

BlockId BlockTree::extend(BlockId parent, MinerId owner) {
  check(parent, "extend");
  if (owner == kNobody) throw StructuralError("extend: only genesis may be unowned");
  const auto id = static_cast<BlockId>(parent_.size());
  const std::uint32_t h = height_[parent] + 1;
  parent_.push_back(parent);
  owner_.push_back(owner);
  height_.push_back(h);
  child_count_.push_back(0);
  ++child_count_[parent];
  if (h > max_height_) max_height_ = h;
  return id;
}

void BlockTree::reserve(std::size_t n) {
  parent_.reserve(n);
  owner_.reserve(n);
  height_.reserve(n);
  child_count_.reserve(n);
}

Block BlockTree::block(BlockId id) const {
  check(id, "block");
  return Block{id, parent_[id], owner_[id], height_[id]};
}

std::vector<BlockId> BlockTree::tips() const {
  std::vector<BlockId> out;
  for (BlockId id = 0; id < parent_.size(); ++id) {
    if (child_count_[id] == 0) out.push_back(id);
  }
  return out;
}

std::vector<BlockId> BlockTree::longest_tips() const {
  std::vector<BlockId> out;
  for (BlockId id = 0; id < parent_.size(); ++id) {
    if (child_count_[id] == 0 && height_[id] == max_height_) out.push_back(id);
  }
  return out;
}

bool BlockTree::is_ancestor(BlockId ancestor, BlockId descendant) const {
  check(ancestor, "is_ancestor");
  check(descendant, "is_ancestor");
  while (height_[descendant] > height_[ancestor]) descendant = parent_[descendant];
  return descendant == ancestor;
}

BlockId BlockTree::common_ancestor(BlockId a, BlockId b) const {
  check(a, "common_ancestor");
  check(b, "common_ancestor");
  while (height_[a] > height_[b]) a = parent_[a];
  while (height_[b] > height_[a]) b = parent_[b];
  while (a != b) {
    a = parent_[a];
    b = parent_[b];
  }
  return a;
}

void BlockTree::dump(std::ostream& os) const {
  for (BlockId id = 0; id < parent_.size(); ++id) {
    os << id << ' ';
    if (id == kGenesis) {
      os << "- -";
    } else {
      os << parent_[id] << ' ' << owner_[id];
    }
    os << ' ' << height_[id] << '\n';
  }
}

std::uint64_t RewardVector::total_blocks() const {
  std::uint64_t total = 0;
  for (auto c : block_counts) total += c;
  return total;
}

RewardVector make_reward(std::vector<std::uint64_t> counts) {
  RewardVector r;
  r.rewards.assign(counts.size(), 0.0);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total > 0) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
      r.rewards[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
  }
  r.block_counts = std::move(counts);
  return r;
}

RewardVector reward(const BlockTree& tree, BlockId tip, std::size_t n_miners) {
  if (!tree.contains(tip)) throw StructuralError("reward: unknown tip " + std::to_string(tip));
  std::vector<std::uint64_t> counts(n_miners, 0);
  for (BlockId b = tip; b != kGenesis; b = tree.parent(b)) {
    const MinerId owner = tree.owner(b);
    if (owner >= n_miners) throw StructuralError("reward: block owner outside miner range");
    ++counts[owner];
  }
  return make_reward(std::move(counts));
}

}  // namespace smarena
