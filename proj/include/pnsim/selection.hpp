#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pnsim/random.hpp"
#include "pnsim/scoring.hpp"
#include "pnsim/types.hpp"

namespace pnsim::pns {

// Score-driven neighbor selection. `weight` is the EWMA weight P of the
// newest sample; `random_slots` (K) outbound slots are filled uniformly from
// the whole network on every reselection, the rest by ascending score.
struct ProposedPolicy {
  double weight = 0.3;
  std::uint32_t random_slots = 1;
  std::uint32_t reselect_every = 10;
  std::uint32_t outbound_slots = 8;
  std::uint32_t inbound_cap = 30;
};

// Baseline: random neighbors chosen once, never changed.
struct FixedRandomPolicy {
  std::uint32_t outbound_slots = 8;
  std::uint32_t inbound_cap = 125;
};

using SelectionPolicy = std::variant<ProposedPolicy, FixedRandomPolicy>;

std::uint32_t outbound_slots(const SelectionPolicy& policy);
std::uint32_t inbound_cap(const SelectionPolicy& policy);
bool is_proposed(const SelectionPolicy& policy);
std::string policy_name(const SelectionPolicy& policy);

// Throws ConfigError for out-of-range parameters.
void validate(const SelectionPolicy& policy);

bool should_reselect(std::uint32_t blocks_since_reselect, const SelectionPolicy& policy);

// Returns true when `candidate` would accept a new outbound connection from
// the reselecting node (its inbound set has room).
using AcceptsConnection = std::function<bool(NodeId candidate)>;

// New outbound list for `self`: up to (outbound_slots - K) best-scored peers
// in ascending (score, id) order, skipping self and candidates that reject,
// then uniform-random picks from all `node_count` nodes until every slot is
// filled. Peers already in `current_outbound` always count as accepting.
// Throws SimulationError if node_count <= outbound_slots or the random fill
// cannot find enough accepting nodes.
std::vector<NodeId> reselect(NodeId self, const ScoreTable& table,
                             std::span<const NodeId> current_outbound, std::size_t node_count,
                             engine::RandomStream& stream, const ProposedPolicy& policy,
                             const AcceptsConnection& accepts);

// outbound[i] lists the peers node i connects to.
struct Topology {
  std::vector<std::vector<NodeId>> outbound;

  std::size_t node_count() const { return outbound.size(); }
  std::vector<std::uint32_t> inbound_counts() const;
};

// Undirected reachability over all connections.
bool is_connected(const Topology& topology);

// Every node opens `outbound_slots` connections to distinct random peers
// whose inbound count is below `inbound_cap`. Disconnected draws are
// retried up to `max_attempts` times, then ConfigError.
Topology initial_topology(std::size_t node_count, engine::RandomStream& stream,
                          std::uint32_t outbound_slots, std::uint32_t inbound_cap,
                          int max_attempts = 50);

}  // namespace pnsim::pns
