#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <string_view>
#include <vector>

#include "pnsim/types.hpp"

namespace pnsim::engine {

enum class Action : std::uint8_t {
  GenerateBlock,
  DeliverInv,
  DeliverGetData,
  DeliverBlock,
  MaybeReselect,
};

std::string_view to_string(Action action);

// `peer` is the counterpart of a wire message (INV sender, GETDATA
// requester, BLOCK provider) and `block` the block it concerns; both are
// unused for MaybeReselect.
struct Event {
  SimTime fire_at = 0;
  std::uint64_t seq = 0;
  Action action = Action::GenerateBlock;
  NodeId target = kNoNode;
  NodeId peer = kNoNode;
  BlockId block = kNoBlock;
};

// Single-threaded discrete-event core. Events fire in (fire_at, seq) order,
// so equal-time events run in insertion order.
class Engine {
 public:
  using Handler = std::function<void(const Event&)>;
  using StopCondition = std::function<bool()>;

  SimTime now() const { return now_; }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

  // Throws SimulationError when fire_at lies before the current clock.
  void schedule(SimTime fire_at, Action action, NodeId target, NodeId peer = kNoNode,
                BlockId block = kNoBlock);

  // Dispatches until `stop` returns true (checked before every dispatch) or
  // the queue drains.
  void run(const Handler& handler, const StopCondition& stop = {});

  // One line per dispatch: "<time> <seq> <action> <target>".
  void set_trace(std::ostream* trace) { trace_ = trace; }

  // Removes and returns every pending event in dispatch order without
  // advancing the clock. Meant for inspecting handler output in tests.
  std::vector<Event> drain();

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::ostream* trace_ = nullptr;
};

}  // namespace pnsim::engine
