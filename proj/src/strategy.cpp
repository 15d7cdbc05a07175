#include "smarena/strategy.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace smarena {

std::string_view to_string(StrategyKind kind) { return kind == StrategyKind::HM ? "HM" : "SM"; }

StrategyKind parse_strategy(std::string_view text) {
  std::string upper;
  for (char c : text) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (upper == "HM") return StrategyKind::HM;
  if (upper == "SM") return StrategyKind::SM;
  throw std::invalid_argument("unknown strategy '" + std::string(text) + "' (expected HM or SM)");
}

BlockId hm_on_mined(HonestView& view, BlockId block, std::vector<BlockId>& out) {
  view.head = block;
  out.push_back(block);
  return view.head;
}

BlockId hm_on_delivered(HonestView& view, const BlockTree& tree, BlockId block) {
  // Equal height keeps the first-received head.
  if (tree.height(block) > tree.height(view.head)) view.head = block;
  return view.head;
}

namespace {

void publish_front(SelfishView& view, const BlockTree& tree, std::uint32_t max_height,
                   std::vector<BlockId>& out) {
  BlockId last = kNoBlock;
  while (!view.private_blocks.empty() && tree.height(view.private_blocks.front()) <= max_height) {
    last = view.private_blocks.front();
    out.push_back(last);
    view.private_blocks.pop_front();
  }
  if (last != kNoBlock && tree.height(last) > tree.height(view.public_head)) {
    view.public_head = last;
  }
}

}  // namespace

BlockId sm_on_self_mined(SelfishView& view, const BlockTree& tree, BlockId new_block,
                         std::vector<BlockId>& out) {
  if (tree.parent(new_block) != view.private_head) {
    throw StructuralError("sm_on_self_mined: block does not extend the private head");
  }
  const bool racing = view.in_race(tree);
  view.private_head = new_block;
  if (racing) {
    // The rest of the branch is already public; releasing the new block wins the race.
    out.push_back(new_block);
    view.public_head = new_block;
  } else {
    view.private_blocks.push_back(new_block);
  }
  return view.private_head;
}

BlockId sm_on_external_block(SelfishView& view, const BlockTree& tree, BlockId delivered,
                             std::vector<BlockId>& out) {
  if (tree.height(delivered) <= tree.height(view.public_head)) return view.private_head;
  view.public_head = delivered;
  const std::int64_t lead = view.lead(tree);
  const std::uint32_t public_height = tree.height(delivered);

  if (lead < 0) {
    view.private_blocks.clear();
    view.private_head = delivered;
  } else if (lead == 1) {
    publish_front(view, tree, tree.height(view.private_head), out);
  } else {
    // lead 0 enters the race at matching height; lead >= 2 releases up to the
    // public height, which is the oldest hidden block for a one-block advance.
    publish_front(view, tree, public_height, out);
  }
  return view.private_head;
}

PublishAction hm_on_event(HonestView& view, const BlockTree& tree, MiningEvent event) {
  PublishAction action;
  if (event.kind == MiningEvent::Kind::Mined) {
    action.new_mining_target = hm_on_mined(view, event.block, action.blocks_to_broadcast);
  } else {
    action.new_mining_target = hm_on_delivered(view, tree, event.block);
  }
  return action;
}

PublishAction sm_on_self_mined(SelfishView& view, const BlockTree& tree, BlockId new_block) {
  PublishAction action;
  action.new_mining_target = sm_on_self_mined(view, tree, new_block, action.blocks_to_broadcast);
  return action;
}

PublishAction sm_on_external_block(SelfishView& view, const BlockTree& tree, BlockId delivered) {
  PublishAction action;
  action.new_mining_target = sm_on_external_block(view, tree, delivered, action.blocks_to_broadcast);
  return action;
}

MinerAutomaton::MinerAutomaton(StrategyKind kind) {
  if (kind == StrategyKind::SM) view_ = SelfishView{};
}

StrategyKind MinerAutomaton::kind() const {
  return std::holds_alternative<HonestView>(view_) ? StrategyKind::HM : StrategyKind::SM;
}

BlockId MinerAutomaton::target() const {
  if (const auto* h = honest()) return h->head;
  return std::get<SelfishView>(view_).private_head;
}

void MinerAutomaton::on_mined(const BlockTree& tree, BlockId block, std::vector<BlockId>& out) {
  if (auto* h = std::get_if<HonestView>(&view_)) {
    hm_on_mined(*h, block, out);
  } else {
    sm_on_self_mined(std::get<SelfishView>(view_), tree, block, out);
  }
}

void MinerAutomaton::on_delivered(const BlockTree& tree, BlockId block, std::vector<BlockId>& out) {
  if (auto* h = std::get_if<HonestView>(&view_)) {
    hm_on_delivered(*h, tree, block);
  } else {
    sm_on_external_block(std::get<SelfishView>(view_), tree, block, out);
  }
}

}  // namespace smarena
