#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "pnsim/chain.hpp"
#include "pnsim/engine.hpp"
#include "pnsim/netmodel.hpp"
#include "pnsim/p2p.hpp"
#include "pnsim/random.hpp"
#include "pnsim/selection.hpp"

namespace pnsim::test {

inline net::UniformOverride uniform(SimTime latency_ms, double bandwidth_bps) {
  net::UniformOverride u;
  u.enabled = true;
  u.latency_ms = latency_ms;
  u.bandwidth_bps = bandwidth_bps;
  return u;
}

inline net::UniformOverride zero_delay() { return uniform(0, net::kUnlimitedBandwidth); }

// Network wired to its own engine, block store and delay model. Not movable:
// the network keeps references into the harness.
struct Harness {
  Harness(std::vector<RegionIndex> regions, net::UniformOverride u, pns::SelectionPolicy policy)
      : delays(net::RegionDataset::builtin_default(), u),
        network(std::move(regions), delays, blocks, policy),
        stream(7, engine::StreamPurpose::Reselection) {}
  Harness(std::size_t nodes, net::UniformOverride u, pns::SelectionPolicy policy)
      : Harness(std::vector<RegionIndex>(nodes, 0), u, policy) {}
  Harness(const Harness&) = delete;

  // Moves the clock to `t` without touching the network.
  void advance_to(SimTime t) {
    engine.schedule(t, engine::Action::GenerateBlock, 0);
    engine.run([](const engine::Event&) {});
  }

  // Block on the miner's tip created one ms from now; not yet announced.
  BlockId mine(NodeId miner, std::uint64_t size = 1000) {
    advance_to(engine.now() + 1);
    const BlockId parent = network.node(miner).view.tip();
    return blocks.append(parent, miner, engine.now(), size).id;
  }

  // Runs every pending event through the network.
  void settle() {
    engine.run([this](const engine::Event& e) { network.dispatch(engine, e, stream); });
  }

  chain::BlockStore blocks;
  net::DelayModel delays;
  p2p::Network network;
  engine::Engine engine;
  engine::RandomStream stream;
};

inline std::size_t count_action(const std::vector<engine::Event>& events, engine::Action action) {
  std::size_t n = 0;
  for (const auto& e : events) n += e.action == action ? 1 : 0;
  return n;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("pnsim_test_" + name + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string first_line(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace pnsim::test
