#include <doctest.h>

#include <cmath>

#include "pnsim/chain.hpp"

using namespace pnsim;
using chain::Block;
using chain::BlockStore;
using chain::ChainView;
using chain::kGenesis;

namespace {

// Log with the given heights, each block's parent being the first block one
// level down. Heights must be non-decreasing.
BlockStore chain_with_heights(const std::vector<std::uint32_t>& heights) {
  BlockStore store;
  std::vector<BlockId> first_at{kGenesis};
  SimTime t = 0;
  for (std::uint32_t h : heights) {
    const auto& block = store.append(first_at.at(h - 1), 0, ++t, 100);
    if (first_at.size() == h) first_at.push_back(block.id);
  }
  return store;
}

}  // namespace

TEST_SUITE("chain") {

TEST_CASE("block store links parents and heights") {
  BlockStore store;
  CHECK(store.size() == 1);
  CHECK(store.at(kGenesis).height == 0);
  const auto& a = store.append(kGenesis, 3, 10, 500);
  const auto& b = store.append(a.id, 4, 20, 500);
  CHECK(a.id == 1);
  CHECK(b.height == 2);
  CHECK(b.parent == a.id);
  CHECK(store.generated().size() == 2);
  CHECK_THROWS_AS(store.append(b.id, 1, 20, 500), SimulationError);
  CHECK_THROWS_AS(store.append(99, 1, 30, 500), SimulationError);
  CHECK_THROWS_AS(store.at(99), SimulationError);
}

TEST_CASE("a height-1 block replaces the genesis tip") {
  BlockStore store;
  const auto& a = store.append(kGenesis, 0, 5, 100);
  ChainView view;
  const auto r = view.accept_block(a, 7);
  CHECK(r.inserted);
  CHECK(r.tip_changed);
  CHECK(view.tip() == a.id);
  CHECK(view.arrival(a.id) == 7);
  CHECK(view.known_count() == 2);
}

TEST_CASE("first-seen block wins a height tie") {
  BlockStore store;
  const auto& a = store.append(kGenesis, 0, 5, 100);
  const auto& b = store.append(kGenesis, 1, 6, 100);
  ChainView view;
  view.accept_block(b, 10);
  const auto r = view.accept_block(a, 11);
  CHECK(r.inserted);
  CHECK_FALSE(r.tip_changed);
  CHECK(view.tip() == b.id);
}

TEST_CASE("a higher block switches the tip") {
  BlockStore store;
  const auto& a = store.append(kGenesis, 0, 5, 100);
  const auto& b = store.append(kGenesis, 1, 6, 100);
  const auto& c = store.append(b.id, 1, 8, 100);
  ChainView view;
  view.accept_block(a, 6);
  view.accept_block(b, 7);
  CHECK(view.tip() == a.id);
  CHECK(view.accept_block(c, 9).tip_changed);
  CHECK(view.tip() == c.id);
  CHECK(view.tip_height() == 2);
}

TEST_CASE("duplicate insertion changes nothing") {
  BlockStore store;
  const auto& a = store.append(kGenesis, 0, 5, 100);
  ChainView view;
  view.accept_block(a, 6);
  const auto r = view.accept_block(a, 50);
  CHECK_FALSE(r.inserted);
  CHECK_FALSE(r.tip_changed);
  CHECK(view.arrival(a.id) == 6);
  CHECK(view.known_count() == 2);
  CHECK_FALSE(view.knows(7));
  CHECK(view.arrival(7) == kNever);
}

TEST_CASE("fork statistics") {
  SUBCASE("linear chain") {
    const auto store = chain_with_heights({1, 2, 3, 4, 5, 6});
    const auto stats = chain::fork_stats(store.all());
    CHECK(stats.fork_count == 0);
    CHECK(stats.orphan_count == 0);
  }
  SUBCASE("two blocks at height 5") {
    const auto store = chain_with_heights({1, 2, 3, 4, 5, 5, 6, 7});
    const auto stats = chain::fork_stats(store.all());
    CHECK(stats.fork_count == 1);
    CHECK(stats.orphan_count == 1);
  }
  SUBCASE("three blocks at one height") {
    const auto store = chain_with_heights({1, 2, 2, 2, 3});
    const auto stats = chain::fork_stats(store.all());
    CHECK(stats.fork_count == 1);
    CHECK(stats.orphan_count == 2);
  }
  SUBCASE("tied tips resolve to the lowest id") {
    const auto store = chain_with_heights({1, 2, 2});
    const auto mask = chain::main_chain_mask(store.all());
    CHECK(mask == std::vector<bool>{true, true, true, false});
  }
}

TEST_CASE("a single node always mines") {
  engine::RandomStream s(1, engine::StreamPurpose::Mining);
  const auto powers = chain::MiningPowerProfile::uniform(1);
  for (int i = 0; i < 1000; ++i) {
    const auto g = chain::next_generation(s, 1000, powers);
    CHECK(g.miner == 0);
    CHECK(g.delta >= 1);
  }
}

TEST_CASE("mining power profiles reject bad input") {
  CHECK_THROWS_AS(chain::MiningPowerProfile({}), ConfigError);
  CHECK_THROWS_AS(chain::MiningPowerProfile({1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(chain::MiningPowerProfile({1.0, INFINITY}), ConfigError);
  engine::RandomStream s(1, engine::StreamPurpose::Mining);
  CHECK_THROWS_AS(chain::next_generation(s, 0, chain::MiningPowerProfile::uniform(2)), ConfigError);
  const auto pareto = chain::MiningPowerProfile::pareto(500, 1.5, s);
  CHECK(pareto.size() == 500);
  for (double p : pareto.powers()) CHECK(p >= 1.0);
  CHECK_THROWS_AS(chain::MiningPowerProfile::pareto(5, 0.0, s), ConfigError);
}

}  // TEST_SUITE
