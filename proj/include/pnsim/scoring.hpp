#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pnsim/types.hpp"

namespace pnsim::pns {

// One INV observation: `sender` announced a block created at `t_block`, and
// the announcement arrived at `t_inv`.
struct ScoreSample {
  NodeId sender = kNoNode;
  SimTime t_inv = 0;
  SimTime t_block = 0;
};

// Per-sender delivery score, lower is better. The first sample from a sender
// sets the score to the observed delay; later samples blend in with weight P:
//   score <- (1 - P) * score + P * (t_inv - t_block)
class ScoreTable {
 public:
  struct Entry {
    double score = 0;
    std::uint32_t samples = 0;
  };

  std::optional<double> score(NodeId sender) const;
  std::uint32_t samples(NodeId sender) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Scored senders in ascending (score, id) order.
  std::vector<NodeId> ranked() const;

  void apply(const ScoreSample& sample, double weight);

 private:
  std::unordered_map<NodeId, Entry> entries_;
};

// Throws SimulationError when t_inv < t_block or the weight lies outside [0, 1].
void update_score(ScoreTable& table, const ScoreSample& sample, double weight);

}  // namespace pnsim::pns
