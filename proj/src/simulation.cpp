#include "pnsim/simulation.hpp"

#include <ostream>
#include <string>

namespace pnsim::sim {

namespace {

std::vector<RegionIndex> draw_regions(const SimulationSetup& setup) {
  if (setup.regions) {
    if (setup.regions->size() != setup.node_count) throw ConfigError("region list length must equal node count");
    return *setup.regions;
  }
  engine::RandomStream stream(setup.seed, engine::StreamPurpose::Region);
  std::vector<RegionIndex> regions(setup.node_count);
  for (auto& region : regions) region = net::assign_region(stream, setup.dataset);
  return regions;
}

chain::MiningPowerProfile draw_powers(const SimulationSetup& setup, engine::RandomStream& stream) {
  if (setup.mining.kind == MiningProfile::Kind::Pareto) {
    return chain::MiningPowerProfile::pareto(setup.node_count, setup.mining.pareto_shape, stream);
  }
  return chain::MiningPowerProfile::uniform(setup.node_count);
}

const SimulationSetup& checked(const SimulationSetup& setup) {
  if (setup.node_count == 0) throw ConfigError("node count must be positive");
  if (!(setup.mean_interval_ms > 0)) throw ConfigError("mean block interval must be positive");
  if (setup.block_size == 0) throw ConfigError("block size must be positive");
  pns::validate(setup.policy);
  setup.dataset.validate();
  if (setup.mining_script) {
    SimTime last = 0;
    for (const ScriptedBlock& block : *setup.mining_script) {
      if (block.at <= last) throw ConfigError("scripted blocks need strictly increasing times after t=0");
      if (block.miner >= setup.node_count) throw ConfigError("scripted miner outside the network");
      last = block.at;
    }
  }
  return setup;
}

}  // namespace

Simulation::Simulation(SimulationSetup setup)
    : setup_((checked(setup), std::move(setup))),
      mining_stream_(setup_.seed, engine::StreamPurpose::Mining),
      reselection_stream_(setup_.seed, engine::StreamPurpose::Reselection),
      regions_(draw_regions(setup_)),
      powers_(draw_powers(setup_, mining_stream_)),
      delays_(setup_.dataset, setup_.uniform),
      network_(regions_, delays_, blocks_, setup_.policy) {
  if (setup_.topology) {
    initial_topology_ = *setup_.topology;
  } else {
    engine::RandomStream topology_stream(setup_.seed, engine::StreamPurpose::Topology);
    initial_topology_ = pns::initial_topology(setup_.node_count, topology_stream,
                                              pns::outbound_slots(setup_.policy),
                                              pns::inbound_cap(setup_.policy));
  }
  network_.install(initial_topology_);
  engine_.set_trace(setup_.event_trace);
  if (setup_.message_trace != nullptr) network_.set_observer(p2p::message_trace_writer(*setup_.message_trace));
  if (setup_.mining_script) setup_.blocks = setup_.mining_script->size();
}

void Simulation::schedule_next_block() {
  if (setup_.mining_script) {
    if (scheduled_ < setup_.mining_script->size()) {
      const ScriptedBlock& next = (*setup_.mining_script)[scheduled_++];
      engine_.schedule(next.at, engine::Action::GenerateBlock, next.miner);
    }
    return;
  }
  if (scheduled_ >= setup_.blocks) return;
  const chain::Generation next = chain::next_generation(mining_stream_, setup_.mean_interval_ms, powers_);
  engine_.schedule(engine_.now() + next.delta, engine::Action::GenerateBlock, next.miner);
  ++scheduled_;
}

void Simulation::on_generate(NodeId miner) {
  const BlockId parent = network_.node(miner).view.tip();
  const chain::Block& block = blocks_.append(parent, miner, engine_.now(), setup_.block_size);
  ++generated_;
  network_.on_block_generated(engine_, miner, block.id);
  schedule_next_block();
}

void Simulation::run() {
  if (generated_ > 0 || engine_.dispatched() > 0) throw SimulationError("a simulation runs only once");
  schedule_next_block();
  engine_.run([this](const engine::Event& event) {
    if (event.action == engine::Action::GenerateBlock) {
      on_generate(event.target);
    } else {
      network_.dispatch(engine_, event, reselection_stream_);
    }
    if (setup_.check_invariants) network_.check_invariants();
  });
}

metrics::BlockPropagationRecord Simulation::record(BlockId block) const {
  const chain::Block& info = blocks_.at(block);
  metrics::BlockPropagationRecord record;
  record.block = block;
  record.created_at = info.created_at;
  record.creator = info.miner;
  record.arrivals.reserve(network_.size());
  for (NodeId id = 0; id < network_.size(); ++id) record.arrivals.push_back(network_.node(id).view.arrival(block));
  return record;
}

std::vector<metrics::BlockStats> Simulation::block_stats() const {
  const auto mask = chain::main_chain_mask(blocks_.all());
  std::vector<metrics::BlockStats> stats;
  stats.reserve(blocks_.generated().size());
  for (const chain::Block& block : blocks_.generated()) {
    const auto rec = record(block.id);
    metrics::BlockStats entry;
    entry.block = block.id;
    entry.height = block.height;
    entry.created_at = block.created_at;
    entry.median_ms = metrics::propagation_percentile(rec, 0.5);
    entry.coverage = rec.coverage();
    entry.on_main_chain = mask[block.id];
    stats.push_back(entry);
  }
  return stats;
}

chain::ForkStats Simulation::forks() const { return chain::fork_stats(blocks_.all()); }

}  // namespace pnsim::sim
