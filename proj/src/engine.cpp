#include "pnsim/engine.hpp"

#include <ostream>
#include <string>

namespace pnsim::engine {

std::string_view to_string(Action action) {
  switch (action) {
    case Action::GenerateBlock:
      return "GenerateBlock";
    case Action::DeliverInv:
      return "DeliverInv";
    case Action::DeliverGetData:
      return "DeliverGetData";
    case Action::DeliverBlock:
      return "DeliverBlock";
    case Action::MaybeReselect:
      return "MaybeReselect";
  }
  return "Unknown";
}

void Engine::schedule(SimTime fire_at, Action action, NodeId target, NodeId peer, BlockId block) {
  if (fire_at < now_) {
    throw SimulationError("cannot schedule " + std::string(to_string(action)) + " at t=" +
                          std::to_string(fire_at) + " before clock t=" + std::to_string(now_));
  }
  queue_.push(Event{fire_at, next_seq_++, action, target, peer, block});
}

void Engine::run(const Handler& handler, const StopCondition& stop) {
  while (!queue_.empty()) {
    if (stop && stop()) break;
    const Event event = queue_.top();
    queue_.pop();
    now_ = event.fire_at;
    ++dispatched_;
    if (trace_ != nullptr) {
      *trace_ << event.fire_at << ' ' << event.seq << ' ' << to_string(event.action) << ' '
              << event.target << '\n';
    }
    handler(event);
  }
}

std::vector<Event> Engine::drain() {
  std::vector<Event> events;
  events.reserve(queue_.size());
  while (!queue_.empty()) {
    events.push_back(queue_.top());
    queue_.pop();
  }
  return events;
}

}  // namespace pnsim::engine
