#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pnsim/chain.hpp"
#include "pnsim/engine.hpp"
#include "pnsim/netmodel.hpp"
#include "pnsim/random.hpp"
#include "pnsim/scoring.hpp"
#include "pnsim/selection.hpp"
#include "pnsim/types.hpp"

namespace pnsim::p2p {

enum class MessageKind : std::uint8_t { Inv, GetData, Block };

std::string_view to_string(MessageKind kind);

struct WireMessage {
  MessageKind kind = MessageKind::Inv;
  BlockId block = kNoBlock;
  NodeId sender = kNoNode;
  NodeId receiver = kNoNode;
  std::uint64_t size_bytes = 0;  // BLOCK only
};

// Called once per delivered message, at delivery time.
using MessageObserver = std::function<void(SimTime delivered_at, const WireMessage&)>;

// Writes "<time> <kind> <src> <dst> <block>" lines.
MessageObserver message_trace_writer(std::ostream& out);

struct PeerSet {
  std::vector<NodeId> outbound;
  std::vector<NodeId> inbound;

  bool has_outbound(NodeId id) const;
  bool has_inbound(NodeId id) const;
  // outbound followed by inbound peers not already listed.
  std::vector<NodeId> all() const;
};

struct NodeState {
  NodeId id = kNoNode;
  RegionIndex region = 0;
  PeerSet peers;
  chain::ChainView view;
  std::vector<BlockId> requested;  // blocks with an outstanding GETDATA
  std::uint32_t blocks_since_reselect = 0;
  pns::ScoreTable scores;

  bool has_requested(BlockId block) const;
};

enum class ConnectResult : std::uint8_t { Accepted, Rejected };

// Node states plus the block relay protocol: an INV announces a block, the
// first INV for an unknown block is answered with GETDATA, and GETDATA is
// answered with the BLOCK. Handlers schedule their follow-up messages on the
// engine; messages in flight survive disconnection.
class Network {
 public:
  Network(std::vector<RegionIndex> regions, const net::DelayModel& delays,
          const chain::BlockStore& blocks, pns::SelectionPolicy policy);

  std::size_t size() const { return nodes_.size(); }
  const NodeState& node(NodeId id) const { return nodes_.at(id); }
  const pns::SelectionPolicy& policy() const { return policy_; }
  std::uint64_t reselections() const { return reselections_; }

  void set_observer(MessageObserver observer) { observer_ = std::move(observer); }

  // Opens every connection of `topology`; throws if any is rejected.
  void install(const pns::Topology& topology);
  pns::Topology topology() const;

  // Rejected when `to` is at its inbound cap or the connection exists.
  // Throws SimulationError for a self-connection.
  ConnectResult connect(NodeId from, NodeId to);
  void disconnect(NodeId from, NodeId to);

  // The miner already holds the block; announce it to every peer.
  void on_block_generated(engine::Engine& engine, NodeId node, BlockId block);
  void on_inv(engine::Engine& engine, NodeId node, NodeId sender, BlockId block);
  void on_getdata(engine::Engine& engine, NodeId node, NodeId requester, BlockId block);
  void on_block(engine::Engine& engine, NodeId node, NodeId provider, BlockId block);
  // Returns true when the node replaced its outbound peers.
  bool on_maybe_reselect(engine::Engine& engine, NodeId node, engine::RandomStream& stream);

  // Routes a protocol event (anything but GenerateBlock) to its handler.
  void dispatch(engine::Engine& engine, const engine::Event& event, engine::RandomStream& stream);

  // Throws SimulationError on any broken capacity, symmetry or
  // request-bookkeeping invariant.
  void check_invariants() const;

 private:
  void announce(engine::Engine& engine, const NodeState& from, BlockId block, NodeId skip);
  void notify(SimTime at, MessageKind kind, BlockId block, NodeId sender, NodeId receiver,
              std::uint64_t size = 0) const;

  std::vector<NodeState> nodes_;
  const net::DelayModel& delays_;
  const chain::BlockStore& blocks_;
  pns::SelectionPolicy policy_;
  std::uint32_t outbound_slots_;
  std::uint32_t inbound_cap_;
  std::uint64_t reselections_ = 0;
  MessageObserver observer_;
};

}  // namespace pnsim::p2p
