#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pnsim/random.hpp"
#include "pnsim/types.hpp"

namespace pnsim::chain {

inline constexpr BlockId kGenesis = 0;

struct Block {
  BlockId id = kGenesis;
  BlockId parent = kNoBlock;  // kNoBlock only for genesis
  std::uint32_t height = 0;
  NodeId miner = kNoNode;
  SimTime created_at = 0;
  std::uint64_t size_bytes = 0;
};

// Append-only log of every block generated in a run. Id 0 is genesis,
// generated blocks get ids 1, 2, ... in creation order.
class BlockStore {
 public:
  BlockStore();

  const Block& at(BlockId id) const;
  bool contains(BlockId id) const { return id < blocks_.size(); }
  std::size_t size() const { return blocks_.size(); }
  // Generated blocks only (genesis excluded).
  std::span<const Block> generated() const { return std::span(blocks_).subspan(1); }
  std::span<const Block> all() const { return blocks_; }

  // Throws SimulationError if the parent is unknown or created_at does not
  // exceed the parent's creation time.
  const Block& append(BlockId parent, NodeId miner, SimTime created_at, std::uint64_t size_bytes);

 private:
  std::vector<Block> blocks_;
};

// One node's local knowledge: which blocks it holds, when each arrived, and
// its current tip (longest chain, first-seen wins ties). Every view starts
// with genesis at t=0.
class ChainView {
 public:
  ChainView();

  struct AcceptResult {
    bool inserted = false;
    bool tip_changed = false;
  };

  // Duplicate insertions return {false, false} and change nothing.
  AcceptResult accept_block(const Block& block, SimTime arrived_at);

  bool knows(BlockId id) const { return id < arrival_.size() && arrival_[id] != kNever; }
  // kNever when unknown.
  SimTime arrival(BlockId id) const { return knows(id) ? arrival_[id] : kNever; }
  BlockId tip() const { return tip_; }
  std::uint32_t tip_height() const { return tip_height_; }
  std::size_t known_count() const { return known_count_; }

 private:
  std::vector<SimTime> arrival_;
  BlockId tip_ = kGenesis;
  std::uint32_t tip_height_ = 0;
  std::size_t known_count_ = 1;
};

// Relative per-node mining power; a node wins a block with probability
// power / total.
class MiningPowerProfile {
 public:
  explicit MiningPowerProfile(std::vector<double> powers);

  static MiningPowerProfile uniform(std::size_t node_count);
  // Heavy-tailed alternative: powers drawn from Pareto(shape), scale 1.
  static MiningPowerProfile pareto(std::size_t node_count, double shape, engine::RandomStream& stream);

  std::span<const double> powers() const { return powers_; }
  std::span<const double> cumulative() const { return cumulative_; }
  std::size_t size() const { return powers_.size(); }

 private:
  std::vector<double> powers_;
  std::vector<double> cumulative_;
};

struct Generation {
  SimTime delta = 0;
  NodeId miner = kNoNode;
};

// Next block of the global mining process: exponential inter-block time
// (rounded to ms, at least 1) and a power-weighted winner.
Generation next_generation(engine::RandomStream& stream, double mean_interval_ms,
                           const MiningPowerProfile& powers);

struct ForkStats {
  std::size_t fork_count = 0;    // heights holding two or more blocks
  std::size_t orphan_count = 0;  // generated blocks off the final longest chain
};

// Final longest chain: the highest block, ties broken by the lowest id
// (earliest created). Returns a mask indexed by block id.
std::vector<bool> main_chain_mask(std::span<const Block> all_blocks);

// `all_blocks` is the full log including genesis at index 0.
ForkStats fork_stats(std::span<const Block> all_blocks);

}  // namespace pnsim::chain
