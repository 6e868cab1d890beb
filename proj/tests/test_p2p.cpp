#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "pnsim/p2p.hpp"

using namespace pnsim;
using engine::Action;
using p2p::ConnectResult;
using test::count_action;
using test::Harness;

TEST_SUITE("p2p") {

TEST_CASE("connect accepts, rejects and refuses self") {
  Harness h(40, test::uniform(100, 1e6), pns::ProposedPolicy{});
  auto& net = h.network;
  CHECK(net.connect(0, 1) == ConnectResult::Accepted);
  CHECK(net.node(0).peers.has_outbound(1));
  CHECK(net.node(1).peers.has_inbound(0));
  CHECK(net.connect(0, 1) == ConnectResult::Rejected);
  CHECK_THROWS_AS(net.connect(2, 2), SimulationError);

  // Fill node 39's inbound up to the cap of 30.
  for (NodeId from = 2; from < 32; ++from) CHECK(net.connect(from, 39) == ConnectResult::Accepted);
  CHECK(net.node(39).peers.inbound.size() == 30);
  CHECK(net.connect(32, 39) == ConnectResult::Rejected);
  CHECK_FALSE(net.node(32).peers.has_outbound(39));

  net.disconnect(2, 39);
  CHECK(net.node(39).peers.inbound.size() == 29);
  CHECK(net.connect(32, 39) == ConnectResult::Accepted);
  CHECK_NOTHROW(net.check_invariants());
}

TEST_CASE("outbound slots are bounded") {
  Harness h(20, test::uniform(100, 1e6), pns::FixedRandomPolicy{});
  for (NodeId to = 1; to <= 8; ++to) CHECK(h.network.connect(0, to) == ConnectResult::Accepted);
  CHECK(h.network.connect(0, 9) == ConnectResult::Rejected);
}

TEST_CASE("a generated block is announced to outbound and inbound peers") {
  Harness h(12, test::uniform(100, 1e6), pns::FixedRandomPolicy{});
  for (NodeId to = 1; to <= 8; ++to) h.network.connect(0, to);
  h.network.connect(9, 0);
  h.network.connect(10, 0);
  const BlockId b = h.mine(0);
  h.network.on_block_generated(h.engine, 0, b);
  const auto events = h.engine.drain();
  CHECK(events.size() == 10);
  CHECK(count_action(events, Action::DeliverInv) == 10);
  for (const auto& e : events) {
    CHECK(e.fire_at == h.engine.now() + 100);
    CHECK(e.peer == 0);
  }
  CHECK(h.network.node(0).view.arrival(b) == h.blocks.at(b).created_at);
}

TEST_CASE("an isolated miner keeps its block") {
  Harness h(3, test::uniform(100, 1e6), pns::FixedRandomPolicy{});
  const BlockId b = h.mine(2);
  h.network.on_block_generated(h.engine, 2, b);
  CHECK(h.engine.pending() == 0);
  CHECK(h.network.node(2).view.knows(b));
  CHECK(h.network.node(2).view.arrival(b) - h.blocks.at(b).created_at == 0);
}

TEST_CASE("INV handling") {
  Harness h(4, test::uniform(100, 1e6), pns::ProposedPolicy{});
  h.network.connect(1, 0);
  h.network.connect(2, 0);
  const BlockId b = h.mine(1);
  h.network.on_block_generated(h.engine, 1, b);
  h.engine.drain();

  SUBCASE("unknown block triggers exactly one GETDATA") {
    h.network.on_inv(h.engine, 0, 1, b);
    auto events = h.engine.drain();
    REQUIRE(events.size() == 1);
    CHECK(events[0].action == Action::DeliverGetData);
    CHECK(events[0].target == 1);
    CHECK(events[0].peer == 0);
    CHECK(h.network.node(0).has_requested(b));

    h.network.on_inv(h.engine, 0, 2, b);
    CHECK(h.engine.pending() == 0);
    CHECK(h.network.node(0).scores.samples(2) == 1);
  }
  SUBCASE("known block is scored but not requested") {
    h.network.on_inv(h.engine, 1, 0, b);
    CHECK(h.engine.pending() == 0);
    CHECK(h.network.node(1).scores.score(0) == static_cast<double>(h.engine.now() - h.blocks.at(b).created_at));
  }
  SUBCASE("INV for a block never generated is a bug") {
    CHECK_THROWS_AS(h.network.on_inv(h.engine, 0, 1, 42), SimulationError);
  }
}

TEST_CASE("baseline nodes keep no scores") {
  Harness h(3, test::uniform(100, 1e6), pns::FixedRandomPolicy{});
  h.network.connect(1, 0);
  const BlockId b = h.mine(1);
  h.network.on_block_generated(h.engine, 1, b);
  h.settle();
  CHECK(h.network.node(0).view.knows(b));
  CHECK(h.network.node(0).scores.empty());
}

TEST_CASE("GETDATA schedules the block with the transfer delay") {
  Harness h(3, test::uniform(100, 8'000'000), pns::FixedRandomPolicy{});
  h.network.connect(1, 0);
  h.network.connect(2, 0);
  const BlockId b = h.mine(0, 546'816);
  h.network.on_block_generated(h.engine, 0, b);
  h.engine.drain();
  h.network.on_getdata(h.engine, 0, 1, b);
  h.network.on_getdata(h.engine, 0, 2, b);
  const auto events = h.engine.drain();
  REQUIRE(events.size() == 2);
  for (const auto& e : events) {
    CHECK(e.action == Action::DeliverBlock);
    CHECK(e.fire_at == h.engine.now() + 647);
    CHECK(e.peer == 0);
  }
  CHECK(events[0].target == 1);
  CHECK(events[1].target == 2);
  CHECK_THROWS_AS(h.network.on_getdata(h.engine, 1, 0, b), SimulationError);
}

TEST_CASE("first BLOCK receipt relays to every peer but the provider") {
  Harness h(12, test::uniform(100, 1e6), pns::FixedRandomPolicy{});
  for (NodeId to = 1; to <= 8; ++to) h.network.connect(0, to);
  h.network.connect(9, 0);
  h.network.connect(10, 0);
  const BlockId b = h.mine(1);
  h.network.on_block_generated(h.engine, 1, b);
  h.engine.drain();
  h.network.on_inv(h.engine, 0, 1, b);
  h.engine.drain();

  h.network.on_block(h.engine, 0, 1, b);
  auto events = h.engine.drain();
  CHECK(count_action(events, Action::DeliverInv) == 9);
  for (const auto& e : events) CHECK(e.target != 1);
  CHECK_FALSE(h.network.node(0).has_requested(b));
  CHECK(h.network.node(0).blocks_since_reselect == 1);

  const SimTime arrival = h.network.node(0).view.arrival(b);
  h.advance_to(h.engine.now() + 50);
  h.network.on_block(h.engine, 0, 9, b);
  CHECK(h.engine.pending() == 0);
  CHECK(h.network.node(0).view.arrival(b) == arrival);
  CHECK(h.network.node(0).blocks_since_reselect == 1);
}

TEST_CASE("the tenth received block triggers a reselection") {
  Harness h(30, test::uniform(10, 1e9), pns::ProposedPolicy{});
  engine::RandomStream topo(1, engine::StreamPurpose::Topology);
  h.network.install(pns::initial_topology(30, topo, 8, 30));
  std::uint32_t last = 0;
  for (int i = 0; i < 10; ++i) {
    const BlockId b = h.mine(1);
    h.network.on_block_generated(h.engine, 1, b);
    last = h.network.node(0).blocks_since_reselect;
    h.settle();
    if (i < 9) {
      CHECK(h.network.node(0).blocks_since_reselect == static_cast<std::uint32_t>(i + 1));
    }
  }
  CHECK(last == 9);
  CHECK(h.network.node(0).blocks_since_reselect == 0);
  CHECK(h.network.node(0).peers.outbound.size() == 8);
  // Every node but the miner received ten blocks.
  CHECK(h.network.reselections() == 29);
  CHECK_NOTHROW(h.network.check_invariants());
}

TEST_CASE("message trace lines") {
  Harness h(2, test::uniform(100, 8000), pns::FixedRandomPolicy{});
  std::ostringstream out;
  h.network.set_observer(p2p::message_trace_writer(out));
  h.network.connect(0, 1);
  const BlockId b = h.mine(0);
  h.network.on_block_generated(h.engine, 0, b);
  h.settle();
  CHECK(out.str() == "101 INV 0 1 1\n201 GETDATA 1 0 1\n1301 BLOCK 0 1 1\n");
}

TEST_CASE("invariant check catches broken state") {
  Harness h(3, test::uniform(100, 1e6), pns::FixedRandomPolicy{});
  h.network.connect(0, 1);
  CHECK_NOTHROW(h.network.check_invariants());
  pns::Topology wrong;
  wrong.outbound = {{1}, {}};
  CHECK_THROWS_AS(h.network.install(wrong), ConfigError);
  pns::Topology dup;
  dup.outbound = {{1}, {}, {}};
  CHECK_THROWS_AS(h.network.install(dup), ConfigError);
}

}  // TEST_SUITE
