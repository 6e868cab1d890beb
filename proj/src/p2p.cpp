#include "pnsim/p2p.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace pnsim::p2p {

namespace {

bool contains(const std::vector<NodeId>& ids, NodeId id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

void erase_value(std::vector<NodeId>& ids, NodeId id) {
  ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
}

std::string node_label(NodeId id) { return "node " + std::to_string(id); }

}  // namespace

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::Inv:
      return "INV";
    case MessageKind::GetData:
      return "GETDATA";
    case MessageKind::Block:
      return "BLOCK";
  }
  return "?";
}

MessageObserver message_trace_writer(std::ostream& out) {
  return [&out](SimTime at, const WireMessage& message) {
    out << at << ' ' << to_string(message.kind) << ' ' << message.sender << ' ' << message.receiver
        << ' ' << message.block << '\n';
  };
}

bool PeerSet::has_outbound(NodeId id) const { return contains(outbound, id); }
bool PeerSet::has_inbound(NodeId id) const { return contains(inbound, id); }

std::vector<NodeId> PeerSet::all() const {
  std::vector<NodeId> peers = outbound;
  for (NodeId id : inbound) {
    if (!contains(outbound, id)) peers.push_back(id);
  }
  return peers;
}

bool NodeState::has_requested(BlockId block) const {
  return std::find(requested.begin(), requested.end(), block) != requested.end();
}

Network::Network(std::vector<RegionIndex> regions, const net::DelayModel& delays,
                 const chain::BlockStore& blocks, pns::SelectionPolicy policy)
    : delays_(delays),
      blocks_(blocks),
      policy_(policy),
      outbound_slots_(pns::outbound_slots(policy)),
      inbound_cap_(pns::inbound_cap(policy)) {
  pns::validate(policy_);
  nodes_.resize(regions.size());
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (regions[id] >= delays_.dataset().size()) {
      throw ConfigError(node_label(id) + " has region index outside the dataset");
    }
    nodes_[id].id = id;
    nodes_[id].region = regions[id];
  }
}

void Network::install(const pns::Topology& topology) {
  if (topology.node_count() != nodes_.size()) throw ConfigError("topology size does not match node count");
  for (NodeId from = 0; from < topology.node_count(); ++from) {
    for (NodeId to : topology.outbound[from]) {
      if (connect(from, to) != ConnectResult::Accepted) {
        throw ConfigError("topology connection " + std::to_string(from) + " -> " + std::to_string(to) +
                          " was rejected");
      }
    }
  }
}

pns::Topology Network::topology() const {
  pns::Topology topology;
  topology.outbound.reserve(nodes_.size());
  for (const NodeState& node : nodes_) topology.outbound.push_back(node.peers.outbound);
  return topology;
}

ConnectResult Network::connect(NodeId from, NodeId to) {
  if (from == to) throw SimulationError(node_label(from) + " cannot connect to itself");
  NodeState& source = nodes_.at(from);
  NodeState& target = nodes_.at(to);
  if (source.peers.has_outbound(to)) return ConnectResult::Rejected;
  if (source.peers.outbound.size() >= outbound_slots_) return ConnectResult::Rejected;
  if (target.peers.inbound.size() >= inbound_cap_) return ConnectResult::Rejected;
  source.peers.outbound.push_back(to);
  target.peers.inbound.push_back(from);
  return ConnectResult::Accepted;
}

void Network::disconnect(NodeId from, NodeId to) {
  erase_value(nodes_.at(from).peers.outbound, to);
  erase_value(nodes_.at(to).peers.inbound, from);
}

void Network::notify(SimTime at, MessageKind kind, BlockId block, NodeId sender, NodeId receiver,
                     std::uint64_t size) const {
  if (observer_) observer_(at, WireMessage{kind, block, sender, receiver, size});
}

void Network::announce(engine::Engine& engine, const NodeState& from, BlockId block, NodeId skip) {
  auto send = [&](NodeId peer) {
    if (peer == skip) return;
    const SimTime delay = delays_.control_delay(from.region, nodes_[peer].region);
    engine.schedule(engine.now() + delay, engine::Action::DeliverInv, peer, from.id, block);
  };
  for (NodeId peer : from.peers.outbound) send(peer);
  for (NodeId peer : from.peers.inbound) {
    if (!from.peers.has_outbound(peer)) send(peer);
  }
}

void Network::on_block_generated(engine::Engine& engine, NodeId node, BlockId block) {
  NodeState& miner = nodes_.at(node);
  const chain::Block& generated = blocks_.at(block);
  miner.view.accept_block(generated, generated.created_at);
  announce(engine, miner, block, kNoNode);
}

void Network::on_inv(engine::Engine& engine, NodeId node, NodeId sender, BlockId block) {
  if (!blocks_.contains(block)) {
    throw SimulationError("INV for block " + std::to_string(block) + " that was never generated");
  }
  NodeState& receiver = nodes_.at(node);
  const SimTime now = engine.now();
  notify(now, MessageKind::Inv, block, sender, node);
  if (const auto* proposed = std::get_if<pns::ProposedPolicy>(&policy_)) {
    pns::update_score(receiver.scores, pns::ScoreSample{sender, now, blocks_.at(block).created_at},
                      proposed->weight);
  }
  if (receiver.view.knows(block) || receiver.has_requested(block)) return;
  receiver.requested.push_back(block);
  const SimTime delay = delays_.control_delay(receiver.region, nodes_.at(sender).region);
  engine.schedule(now + delay, engine::Action::DeliverGetData, sender, node, block);
}

void Network::on_getdata(engine::Engine& engine, NodeId node, NodeId requester, BlockId block) {
  const NodeState& holder = nodes_.at(node);
  notify(engine.now(), MessageKind::GetData, block, requester, node);
  if (!holder.view.knows(block)) {
    throw SimulationError(node_label(node) + " received GETDATA for block " + std::to_string(block) +
                          " it does not hold");
  }
  const std::uint64_t size = blocks_.at(block).size_bytes;
  const SimTime delay = delays_.block_transfer_delay(holder.region, nodes_.at(requester).region, size);
  engine.schedule(engine.now() + delay, engine::Action::DeliverBlock, requester, node, block);
}

void Network::on_block(engine::Engine& engine, NodeId node, NodeId provider, BlockId block) {
  NodeState& receiver = nodes_.at(node);
  const chain::Block& delivered = blocks_.at(block);
  notify(engine.now(), MessageKind::Block, block, provider, node, delivered.size_bytes);
  auto pending = std::find(receiver.requested.begin(), receiver.requested.end(), block);
  if (pending != receiver.requested.end()) receiver.requested.erase(pending);
  if (!receiver.view.accept_block(delivered, engine.now()).inserted) return;
  announce(engine, receiver, block, provider);
  ++receiver.blocks_since_reselect;
  if (pns::should_reselect(receiver.blocks_since_reselect, policy_)) {
    engine.schedule(engine.now(), engine::Action::MaybeReselect, node);
  }
}

bool Network::on_maybe_reselect(engine::Engine&, NodeId node, engine::RandomStream& stream) {
  NodeState& self = nodes_.at(node);
  if (!pns::should_reselect(self.blocks_since_reselect, policy_)) return false;
  const auto& proposed = std::get<pns::ProposedPolicy>(policy_);
  const auto accepts = [this](NodeId candidate) {
    return nodes_[candidate].peers.inbound.size() < inbound_cap_;
  };
  const std::vector<NodeId> chosen =
      pns::reselect(node, self.scores, self.peers.outbound, nodes_.size(), stream, proposed, accepts);

  const std::vector<NodeId> previous = self.peers.outbound;
  for (NodeId peer : previous) {
    if (!contains(chosen, peer)) disconnect(node, peer);
  }
  for (NodeId peer : chosen) {
    if (self.peers.has_outbound(peer)) continue;
    if (connect(node, peer) != ConnectResult::Accepted) {
      throw SimulationError(node_label(node) + " reselect chose " + node_label(peer) + " which rejected");
    }
  }
  self.peers.outbound = chosen;
  self.blocks_since_reselect = 0;
  ++reselections_;
  return true;
}

void Network::dispatch(engine::Engine& engine, const engine::Event& event, engine::RandomStream& stream) {
  using engine::Action;
  switch (event.action) {
    case Action::DeliverInv:
      on_inv(engine, event.target, event.peer, event.block);
      break;
    case Action::DeliverGetData:
      on_getdata(engine, event.target, event.peer, event.block);
      break;
    case Action::DeliverBlock:
      on_block(engine, event.target, event.peer, event.block);
      break;
    case Action::MaybeReselect:
      on_maybe_reselect(engine, event.target, stream);
      break;
    case Action::GenerateBlock:
      throw SimulationError("GenerateBlock is not a protocol event");
  }
}

void Network::check_invariants() const {
  for (const NodeState& node : nodes_) {
    const auto& peers = node.peers;
    const std::string who = node_label(node.id);
    if (peers.outbound.size() > outbound_slots_) throw SimulationError(who + " exceeds its outbound slots");
    if (peers.inbound.size() > inbound_cap_) throw SimulationError(who + " exceeds its inbound cap");
    for (std::size_t i = 0; i < peers.outbound.size(); ++i) {
      const NodeId peer = peers.outbound[i];
      if (peer == node.id) throw SimulationError(who + " is connected to itself");
      if (std::find(peers.outbound.begin() + static_cast<std::ptrdiff_t>(i) + 1, peers.outbound.end(), peer) !=
          peers.outbound.end()) {
        throw SimulationError(who + " lists outbound peer " + std::to_string(peer) + " twice");
      }
      if (!nodes_[peer].peers.has_inbound(node.id)) {
        throw SimulationError(who + " -> " + std::to_string(peer) + " has no matching inbound entry");
      }
    }
    for (NodeId peer : peers.inbound) {
      if (!nodes_[peer].peers.has_outbound(node.id)) {
        throw SimulationError(who + " <- " + std::to_string(peer) + " has no matching outbound entry");
      }
    }
    for (BlockId block : node.requested) {
      if (node.view.knows(block)) {
        throw SimulationError(who + " still requests block " + std::to_string(block) + " it already holds");
      }
    }
  }
}

}  // namespace pnsim::p2p
