#include "pnsim/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pnsim::chain {

BlockStore::BlockStore() { blocks_.push_back(Block{}); }

const Block& BlockStore::at(BlockId id) const {
  if (!contains(id)) throw SimulationError("unknown block id " + std::to_string(id));
  return blocks_[id];
}

const Block& BlockStore::append(BlockId parent, NodeId miner, SimTime created_at,
                                std::uint64_t size_bytes) {
  const Block& parent_block = at(parent);
  if (created_at <= parent_block.created_at) {
    throw SimulationError("block created at t=" + std::to_string(created_at) +
                          " does not follow its parent (t=" + std::to_string(parent_block.created_at) + ")");
  }
  Block block;
  block.id = static_cast<BlockId>(blocks_.size());
  block.parent = parent;
  block.height = parent_block.height + 1;
  block.miner = miner;
  block.created_at = created_at;
  block.size_bytes = size_bytes;
  blocks_.push_back(block);
  return blocks_.back();
}

ChainView::ChainView() : arrival_(1, 0) {}

ChainView::AcceptResult ChainView::accept_block(const Block& block, SimTime arrived_at) {
  if (knows(block.id)) return {};
  if (block.id >= arrival_.size()) arrival_.resize(block.id + 1, kNever);
  arrival_[block.id] = arrived_at;
  ++known_count_;
  AcceptResult result{true, false};
  if (block.height > tip_height_) {
    tip_ = block.id;
    tip_height_ = block.height;
    result.tip_changed = true;
  }
  return result;
}

MiningPowerProfile::MiningPowerProfile(std::vector<double> powers) : powers_(std::move(powers)) {
  if (powers_.empty()) throw ConfigError("mining power profile needs at least one node");
  for (double power : powers_) {
    if (!(power > 0) || !std::isfinite(power)) throw ConfigError("mining powers must be positive and finite");
  }
  cumulative_.resize(powers_.size());
  std::partial_sum(powers_.begin(), powers_.end(), cumulative_.begin());
}

MiningPowerProfile MiningPowerProfile::uniform(std::size_t node_count) {
  return MiningPowerProfile(std::vector<double>(node_count, 1.0));
}

MiningPowerProfile MiningPowerProfile::pareto(std::size_t node_count, double shape,
                                              engine::RandomStream& stream) {
  if (!(shape > 0)) throw ConfigError("pareto shape must be positive");
  std::vector<double> powers(node_count);
  for (double& power : powers) power = stream.pareto(shape);
  return MiningPowerProfile(std::move(powers));
}

Generation next_generation(engine::RandomStream& stream, double mean_interval_ms,
                           const MiningPowerProfile& powers) {
  if (!(mean_interval_ms > 0)) throw ConfigError("mean block interval must be positive");
  const double sample = stream.exponential(mean_interval_ms);
  Generation generation;
  generation.delta = std::max<SimTime>(1, std::llround(sample));
  generation.miner = static_cast<NodeId>(engine::sample_cumulative(stream, powers.cumulative()));
  return generation;
}

std::vector<bool> main_chain_mask(std::span<const Block> all_blocks) {
  std::vector<bool> mask(all_blocks.size(), false);
  if (all_blocks.empty()) return mask;
  BlockId best = kGenesis;
  for (const Block& block : all_blocks) {
    if (block.height > all_blocks[best].height) best = block.id;
  }
  for (BlockId id = best; id != kNoBlock; id = all_blocks[id].parent) mask[id] = true;
  return mask;
}

ForkStats fork_stats(std::span<const Block> all_blocks) {
  ForkStats stats;
  if (all_blocks.size() <= 1) return stats;
  std::uint32_t max_height = 0;
  for (const Block& block : all_blocks) max_height = std::max(max_height, block.height);
  std::vector<std::size_t> per_height(max_height + 1, 0);
  for (const Block& block : all_blocks.subspan(1)) ++per_height[block.height];
  stats.fork_count = static_cast<std::size_t>(
      std::count_if(per_height.begin(), per_height.end(), [](std::size_t n) { return n >= 2; }));
  const auto mask = main_chain_mask(all_blocks);
  for (const Block& block : all_blocks.subspan(1)) {
    if (!mask[block.id]) ++stats.orphan_count;
  }
  return stats;
}

}  // namespace pnsim::chain
