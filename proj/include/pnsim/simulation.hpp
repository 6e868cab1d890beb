#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pnsim/chain.hpp"
#include "pnsim/engine.hpp"
#include "pnsim/metrics.hpp"
#include "pnsim/netmodel.hpp"
#include "pnsim/p2p.hpp"
#include "pnsim/random.hpp"
#include "pnsim/selection.hpp"

namespace pnsim::sim {

struct MiningProfile {
  enum class Kind : std::uint8_t { Uniform, Pareto };
  Kind kind = Kind::Uniform;
  double pareto_shape = 1.5;
};

struct ScriptedBlock {
  SimTime at = 0;
  NodeId miner = kNoNode;
};

struct SimulationSetup {
  std::size_t node_count = 0;
  double mean_interval_ms = 600'000;
  std::uint64_t block_size = 546'816;
  std::uint64_t blocks = 0;
  std::uint64_t seed = 0;
  pns::SelectionPolicy policy = pns::ProposedPolicy{};
  net::RegionDataset dataset = net::RegionDataset::builtin_default();
  net::UniformOverride uniform;
  MiningProfile mining;

  // Hand-built scenarios: fixed regions, topology or mining schedule replace
  // the corresponding random draws.
  std::optional<std::vector<RegionIndex>> regions;
  std::optional<pns::Topology> topology;
  std::optional<std::vector<ScriptedBlock>> mining_script;

  bool check_invariants = false;  // after every dispatched event
  std::ostream* event_trace = nullptr;
  std::ostream* message_trace = nullptr;
};

// One complete run. Mining stops after `blocks` generated blocks; the
// engine then drains so every block finishes propagating.
//
// Random streams: regions, mining powers and the mining schedule come from
// the environment streams (Region, Mining) and the initial topology from
// the Topology stream, so two runs with the same seed but different
// policies see the same environment. Reselection draws use their own stream.
class Simulation {
 public:
  explicit Simulation(SimulationSetup setup);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  void run();

  const SimulationSetup& setup() const { return setup_; }
  const engine::Engine& engine() const { return engine_; }
  const chain::BlockStore& blocks() const { return blocks_; }
  const p2p::Network& network() const { return network_; }
  const pns::Topology& initial_topology() const { return initial_topology_; }
  const std::vector<RegionIndex>& regions() const { return regions_; }
  const chain::MiningPowerProfile& mining_powers() const { return powers_; }
  std::uint64_t generated() const { return generated_; }

  metrics::BlockPropagationRecord record(BlockId block) const;
  // One entry per generated block, in creation order.
  std::vector<metrics::BlockStats> block_stats() const;
  chain::ForkStats forks() const;

 private:
  void on_generate(NodeId miner);
  void schedule_next_block();

  SimulationSetup setup_;
  engine::RandomStream mining_stream_;
  engine::RandomStream reselection_stream_;
  std::vector<RegionIndex> regions_;
  chain::MiningPowerProfile powers_;
  net::DelayModel delays_;
  chain::BlockStore blocks_;
  engine::Engine engine_;
  p2p::Network network_;
  pns::Topology initial_topology_;
  std::uint64_t generated_ = 0;
  std::uint64_t scheduled_ = 0;
};

}  // namespace pnsim::sim
