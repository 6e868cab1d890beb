#include "pnsim/selection.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <string>

namespace pnsim::pns {

namespace {

bool contains(std::span<const NodeId> ids, NodeId id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

// Rejection sampling, falling back to a scan of all eligible nodes.
std::optional<NodeId> random_pick(std::size_t node_count, engine::RandomStream& stream,
                                  const std::function<bool(NodeId)>& eligible) {
  const std::size_t tries = 16 * node_count + 64;
  for (std::size_t i = 0; i < tries; ++i) {
    const auto id = static_cast<NodeId>(stream.uniform_below(node_count));
    if (eligible(id)) return id;
  }
  std::vector<NodeId> remaining;
  for (NodeId id = 0; id < node_count; ++id) {
    if (eligible(id)) remaining.push_back(id);
  }
  if (remaining.empty()) return std::nullopt;
  return remaining[stream.uniform_below(remaining.size())];
}

}  // namespace

std::uint32_t outbound_slots(const SelectionPolicy& policy) {
  return std::visit([](const auto& p) { return p.outbound_slots; }, policy);
}

std::uint32_t inbound_cap(const SelectionPolicy& policy) {
  return std::visit([](const auto& p) { return p.inbound_cap; }, policy);
}

bool is_proposed(const SelectionPolicy& policy) {
  return std::holds_alternative<ProposedPolicy>(policy);
}

std::string policy_name(const SelectionPolicy& policy) {
  return is_proposed(policy) ? "proposed" : "fixed";
}

void validate(const SelectionPolicy& policy) {
  if (outbound_slots(policy) == 0) throw ConfigError("outbound slots must be at least 1");
  if (const auto* p = std::get_if<ProposedPolicy>(&policy)) {
    if (!(p->weight >= 0.0 && p->weight <= 1.0)) throw ConfigError("P must lie in [0, 1]");
    if (p->random_slots > p->outbound_slots) throw ConfigError("K must not exceed the outbound slot count");
    if (p->reselect_every < 1) throw ConfigError("reselect interval must be at least 1 block");
  }
}

bool should_reselect(std::uint32_t blocks_since_reselect, const SelectionPolicy& policy) {
  const auto* p = std::get_if<ProposedPolicy>(&policy);
  return p != nullptr && blocks_since_reselect >= p->reselect_every;
}

std::vector<NodeId> reselect(NodeId self, const ScoreTable& table,
                             std::span<const NodeId> current_outbound, std::size_t node_count,
                             engine::RandomStream& stream, const ProposedPolicy& policy,
                             const AcceptsConnection& accepts) {
  const std::uint32_t slots = policy.outbound_slots;
  if (node_count <= slots) {
    throw SimulationError("reselect needs more nodes than outbound slots");
  }
  const std::uint32_t scored_slots = slots - std::min(policy.random_slots, slots);

  std::vector<NodeId> chosen;
  chosen.reserve(slots);
  auto acceptable = [&](NodeId id) {
    return id != self && !contains(chosen, id) && (contains(current_outbound, id) || accepts(id));
  };

  for (NodeId candidate : table.ranked()) {
    if (chosen.size() >= scored_slots) break;
    if (acceptable(candidate)) chosen.push_back(candidate);
  }
  while (chosen.size() < slots) {
    auto pick = random_pick(node_count, stream, acceptable);
    if (!pick) throw SimulationError("reselect: no node accepts a new connection");
    chosen.push_back(*pick);
  }
  return chosen;
}

std::vector<std::uint32_t> Topology::inbound_counts() const {
  std::vector<std::uint32_t> counts(outbound.size(), 0);
  for (const auto& peers : outbound) {
    for (NodeId peer : peers) ++counts[peer];
  }
  return counts;
}

bool is_connected(const Topology& topology) {
  const std::size_t n = topology.node_count();
  if (n <= 1) return true;
  std::vector<std::vector<NodeId>> adjacency(n);
  for (NodeId from = 0; from < n; ++from) {
    for (NodeId to : topology.outbound[from]) {
      adjacency[from].push_back(to);
      adjacency[to].push_back(from);
    }
  }
  std::vector<bool> seen(n, false);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId node = frontier.front();
    frontier.pop();
    for (NodeId next : adjacency[node]) {
      if (!seen[next]) {
        seen[next] = true;
        ++reached;
        frontier.push(next);
      }
    }
  }
  return reached == n;
}

Topology initial_topology(std::size_t node_count, engine::RandomStream& stream,
                          std::uint32_t outbound_slots, std::uint32_t inbound_cap, int max_attempts) {
  if (node_count <= outbound_slots) {
    throw ConfigError("node count (" + std::to_string(node_count) +
                      ") must exceed the outbound slot count (" + std::to_string(outbound_slots) + ")");
  }
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Topology topology;
    topology.outbound.assign(node_count, {});
    std::vector<std::uint32_t> inbound(node_count, 0);
    bool complete = true;
    for (NodeId self = 0; self < node_count && complete; ++self) {
      auto& peers = topology.outbound[self];
      auto eligible = [&](NodeId id) {
        return id != self && inbound[id] < inbound_cap && !contains(peers, id);
      };
      while (peers.size() < outbound_slots) {
        auto pick = random_pick(node_count, stream, eligible);
        if (!pick) {
          complete = false;
          break;
        }
        peers.push_back(*pick);
        ++inbound[*pick];
      }
    }
    if (complete && is_connected(topology)) return topology;
  }
  throw ConfigError("could not build a connected topology with " + std::to_string(outbound_slots) +
                    " outbound slots and inbound cap " + std::to_string(inbound_cap));
}

}  // namespace pnsim::pns
