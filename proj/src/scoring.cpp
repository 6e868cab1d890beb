#include "pnsim/scoring.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace pnsim::pns {

std::optional<double> ScoreTable::score(NodeId sender) const {
  auto it = entries_.find(sender);
  if (it == entries_.end()) return std::nullopt;
  return it->second.score;
}

std::uint32_t ScoreTable::samples(NodeId sender) const {
  auto it = entries_.find(sender);
  return it == entries_.end() ? 0 : it->second.samples;
}

std::vector<NodeId> ScoreTable::ranked() const {
  std::vector<std::pair<double, NodeId>> order;
  order.reserve(entries_.size());
  for (const auto& [sender, entry] : entries_) order.emplace_back(entry.score, sender);
  std::sort(order.begin(), order.end());
  std::vector<NodeId> ids;
  ids.reserve(order.size());
  for (const auto& item : order) ids.push_back(item.second);
  return ids;
}

void ScoreTable::apply(const ScoreSample& sample, double weight) {
  const auto delay = static_cast<double>(sample.t_inv - sample.t_block);
  Entry& entry = entries_[sample.sender];
  if (entry.samples == 0) {
    entry.score = delay;
  } else if (weight == 1.0) {
    entry.score = delay;
  } else {
    // (1 - P) * s + P * x; the clamp absorbs rounding so the score never
    // leaves the range of the samples seen.
    const double old = entry.score;
    entry.score = std::clamp(old + weight * (delay - old), std::min(old, delay), std::max(old, delay));
  }
  ++entry.samples;
}

void update_score(ScoreTable& table, const ScoreSample& sample, double weight) {
  if (sample.t_inv < sample.t_block) {
    throw SimulationError("INV from node " + std::to_string(sample.sender) + " arrived at t=" +
                          std::to_string(sample.t_inv) + " before its block was created (t=" +
                          std::to_string(sample.t_block) + ")");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) throw SimulationError("score weight must lie in [0, 1]");
  table.apply(sample, weight);
}

}  // namespace pnsim::pns
