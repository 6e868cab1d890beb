#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pnsim {

// Simulated time in integer milliseconds since simulation start.
using SimTime = std::int64_t;
using NodeId = std::uint32_t;
using BlockId = std::uint32_t;
using RegionIndex = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr BlockId kNoBlock = std::numeric_limits<BlockId>::max();
inline constexpr SimTime kNever = -1;

// Invalid user input: bad config, malformed dataset, impossible topology.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken simulator invariant. Never expected on a valid run.
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pnsim
