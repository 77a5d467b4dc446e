#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "coinroute/engine.hpp"

using namespace coinroute;

namespace {

const char* kTwoPair = R"(
node 1 router power 3
node 2 router log1p
node 4 source
node 5 source
node 6 destination
node 7 destination
link 4 1
link 4 2
link 5 2
link 1 6
link 2 6
link 2 7
regime both 4 -> 6
regime both 5 -> 7
)";

}  // namespace

TEST_CASE("inject places one unit packet per active pair") {
  SimState state(parse_topology(kTwoPair), "both", 50, 1);
  state.inject();
  REQUIRE(state.in_flight().size() == 2);
  CHECK(state.in_flight()[0].position == 4);
  CHECK(state.in_flight()[0].destination == 6);
  CHECK(state.in_flight()[1].position == 5);
  CHECK(state.in_flight()[1].destination == 7);
  for (const Packet& p : state.in_flight()) {
    CHECK(p.amount == 1.0);
    CHECK(p.injected_at == 0);
    CHECK(p.accrued_delay == 0.0);
  }
  CHECK(state.injected_amount() == 2.0);
  const auto groups = state.pending_traffic();
  REQUIRE(groups.size() == 2);
  CHECK(groups.at({4, 6}) == 1.0);
  CHECK(groups.at({5, 7}) == 1.0);
}

TEST_CASE("an empty regime injects nothing") {
  NetworkTopology topo(
      {{4, NodeRole::source, {}}, {6, NodeRole::destination, {}}}, {},
      {{"idle", {}}});
  SimState state(topo, "idle", 50, 1);
  state.inject();
  CHECK(state.in_flight().empty());
  CHECK(state.injected_amount() == 0.0);
}

TEST_CASE("an unknown regime is rejected at construction") {
  CHECK_THROWS_AS(SimState(parse_topology(kTwoPair), "rush-hour", 50, 1),
                  ValidationError);
}

TEST_CASE("step advances packets one hop and records arrivals") {
  SimState state(parse_topology(kTwoPair), "both", 50, 1);
  state.inject();
  state.step({{{4, 6}, NeuronAction::single(2, 1.0)},
              {{5, 7}, NeuronAction::single(2, 1.0)}});
  CHECK(state.clock() == 1);
  REQUIRE(state.in_flight().size() == 2);
  for (const Packet& p : state.in_flight()) CHECK(p.position == 2);
  CHECK(state.ledger().load(2, 6, 0) == 1.0);
  CHECK(state.ledger().load(2, 7, 0) == 1.0);
  CHECK(state.ledger().total_load(2, 0) == 2.0);
  CHECK(state.ledger().total_load(1, 0) == 0.0);

  // both packets share router 2's delay at its windowed load, half each
  const double w = delay_at({DelayFnKind::log1p, 0.0}, 2.0 / 50.0);
  for (const Packet& p : state.in_flight())
    CHECK(p.accrued_delay == Catch::Approx(w / 2.0));
}

TEST_CASE("packets reaching their destination are absorbed with their delay") {
  SimState state(parse_topology(kTwoPair), "both", 1, 1);
  state.inject();
  state.step({{{4, 6}, NeuronAction::single(2, 1.0)},
              {{5, 7}, NeuronAction::single(2, 1.0)}});
  state.step({{{2, 6}, NeuronAction::single(6, 1.0)},
              {{2, 7}, NeuronAction::single(7, 1.0)}});
  CHECK(state.in_flight().empty());
  REQUIRE(state.absorbed_last_step().size() == 2);
  CHECK(state.absorbed_amount() == 2.0);
  CHECK(state.injected_amount() == 2.0);
  const double each = std::log(3.0) / 2.0;  // half of router 2's step delay
  CHECK(state.completed().at(6).count == 1);
  CHECK(state.completed().at(6).delay == Catch::Approx(each));
  CHECK(state.completed().at(7).delay == Catch::Approx(each));

  // traces record the full route with arrival and departure steps
  const Packet& p = state.absorbed_last_step()[0];
  REQUIRE(p.trace.size() == 3);
  CHECK(p.trace[0].node == 4);
  CHECK(p.trace[0].departed == 0);
  CHECK(p.trace[1].node == 2);
  CHECK(p.trace[1].arrived == 0);
  CHECK(p.trace[1].departed == 1);
  CHECK(p.trace[2].arrived == 1);
  CHECK_FALSE(p.trace[2].departed.has_value());
}

TEST_CASE("absorption clears between steps") {
  SimState state(parse_topology(kTwoPair), "both", 1, 1);
  state.inject();
  state.step({{{4, 6}, NeuronAction::single(2, 1.0)},
              {{5, 7}, NeuronAction::single(2, 1.0)}});
  CHECK(state.absorbed_last_step().empty());
  state.step({{{2, 6}, NeuronAction::single(6, 1.0)},
              {{2, 7}, NeuronAction::single(7, 1.0)}});
  CHECK(state.absorbed_last_step().size() == 2);
  state.step({});
  CHECK(state.absorbed_last_step().empty());
}

TEST_CASE("step rejects malformed action maps") {
  auto fresh = [] {
    SimState state(parse_topology(kTwoPair), "both", 50, 1);
    state.inject();
    return state;
  };
  SECTION("missing action") {
    auto state = fresh();
    CHECK_THROWS_WITH(state.step({{{4, 6}, NeuronAction::single(2, 1.0)}}),
                      Catch::Matchers::ContainsSubstring("no action"));
  }
  SECTION("nonexistent link") {
    auto state = fresh();
    CHECK_THROWS_WITH(state.step({{{4, 6}, NeuronAction::single(6, 1.0)},
                                  {{5, 7}, NeuronAction::single(2, 1.0)}}),
                      Catch::Matchers::ContainsSubstring("no link"));
  }
  SECTION("wrong amount") {
    auto state = fresh();
    CHECK_THROWS_WITH(state.step({{{4, 6}, NeuronAction::single(2, 0.5)},
                                  {{5, 7}, NeuronAction::single(2, 1.0)}}),
                      Catch::Matchers::ContainsSubstring("does not match"));
  }
  SECTION("split allocation") {
    auto state = fresh();
    NeuronAction split;
    split.allocation[1] = 0.5;
    split.allocation[2] = 0.5;
    CHECK_THROWS_WITH(state.step({{{4, 6}, split},
                                  {{5, 7}, NeuronAction::single(2, 1.0)}}),
                      Catch::Matchers::ContainsSubstring("split"));
  }
  SECTION("action for an idle neuron") {
    auto state = fresh();
    CHECK_THROWS_WITH(state.step({{{4, 6}, NeuronAction::single(2, 1.0)},
                                  {{5, 7}, NeuronAction::single(2, 1.0)},
                                  {{1, 6}, NeuronAction::single(6, 1.0)}}),
                      Catch::Matchers::ContainsSubstring("idle"));
  }
}

TEST_CASE("stranding in a deeper network is caught before any move") {
  const char* doc = R"(
node 1 router power 3
node 2 router log1p
node 3 router power 3
node 4 source
node 6 destination
node 7 destination
link 4 1
link 1 2
link 1 3
link 2 6
link 2 7
link 3 7
regime light 4 -> 6
)";
  SimState state(parse_topology(doc), "light", 50, 1);
  state.inject();
  state.step({{{4, 6}, NeuronAction::single(1, 1.0)}});
  // router 3 only reaches 7, so sending the d6 packet there must fail
  CHECK_THROWS_WITH(state.step({{{1, 6}, NeuronAction::single(3, 1.0)}}),
                    Catch::Matchers::ContainsSubstring("stranded"));
}

TEST_CASE("amount is conserved across a random run") {
  SimState state(parse_topology(kTwoPair), "both", 10, 77);
  std::mt19937_64 rng(123);
  for (int t = 0; t < 40; ++t) {
    if (t < 30) state.inject();
    ActionMap actions;
    for (const auto& [neuron, traffic] : state.pending_traffic()) {
      // random viable next hop
      std::vector<NodeId> viable;
      for (NodeId next : state.topology().outgoing(neuron.router)) {
        if (next == neuron.destination ||
            !enumerate_paths(state.topology(), next, neuron.destination)
                 .empty())
          viable.push_back(next);
      }
      REQUIRE_FALSE(viable.empty());
      actions.emplace(neuron,
                      NeuronAction::single(viable[rng() % viable.size()],
                                           traffic));
    }
    state.step(actions);
    CHECK(state.injected_amount() ==
          Catch::Approx(state.absorbed_amount() + state.in_flight_amount()));
  }
  CHECK(state.injected_amount() == 60.0);
  CHECK(state.absorbed_amount() == 60.0);  // drained by the end
}
