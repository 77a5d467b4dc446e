#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "coinroute/wlu.hpp"

using namespace coinroute;

namespace {

LoadLedger make_ledger(int window) {
  return LoadLedger({{1, {DelayFnKind::power, 3.0}},
                     {2, {DelayFnKind::log1p, 0.0}},
                     {3, {DelayFnKind::power, 3.0}}},
                    window);
}

LoadLedger random_ledger(std::mt19937_64& rng) {
  const int window = 1 + static_cast<int>(rng() % 5);
  LoadLedger ledger = make_ledger(window);
  std::uniform_real_distribution<double> amount(0.0, 2.5);
  const int entries = 1 + static_cast<int>(rng() % 24);
  const NodeId routers[] = {1, 2, 3};
  const NodeId dests[] = {6, 7, 8};
  for (int i = 0; i < entries; ++i)
    ledger.add(routers[rng() % 3], dests[rng() % 3],
               static_cast<Timestep>(rng() % 10), amount(rng));
  return ledger;
}

}  // namespace

TEST_CASE("clamp zeroes one destination and keeps the rest") {
  LoadLedger ledger = make_ledger(2);
  ledger.add(2, 6, 0, 1.0);
  ledger.add(2, 7, 0, 1.0);
  LoadLedger clamped = clamp(ledger, Subworld{6});
  CHECK(clamped.load(2, 6, 0) == 0.0);
  CHECK(clamped.load(2, 7, 0) == 1.0);
  CHECK(clamped.horizon() == ledger.horizon());
  CHECK(clamped.window() == ledger.window());
  CHECK(world_utility(clamped) < world_utility(ledger));
}

TEST_CASE("clamp is idempotent") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    LoadLedger ledger = random_ledger(rng);
    const Subworld w{static_cast<NodeId>(6 + rng() % 3)};
    LoadLedger once = clamp(ledger, w);
    CHECK(clamp(once, w) == once);
  }
}

TEST_CASE("clamping a subworld with no traffic changes no utility") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    LoadLedger ledger = random_ledger(rng);
    LoadLedger clamped = clamp(ledger, Subworld{42});
    CHECK(world_utility(clamped) == world_utility(ledger));
    CHECK(wonderful_life_utility(ledger, Subworld{42}) == 0.0);
  }
}

TEST_CASE("wonderful life utility of a lone contributor on a cubic router") {
  // L = 1, one step: total load 2 of which the subworld contributes 1.
  LoadLedger ledger = make_ledger(1);
  ledger.add(1, 6, 0, 1.0);
  ledger.add(1, 7, 0, 1.0);
  CHECK(world_utility(ledger) == Catch::Approx(8.0));
  CHECK(wonderful_life_utility(ledger, Subworld{6}) == Catch::Approx(7.0));
  CHECK(wonderful_life_utility(ledger, Subworld{7}) == Catch::Approx(7.0));
}

TEST_CASE("delta on a log router carrying only subworld traffic") {
  LoadLedger ledger = make_ledger(1);
  ledger.add(2, 6, 0, 2.0);
  CHECK(delta(ledger, Subworld{6}, 2, 0) == Catch::Approx(std::log(3.0)));
  // with background traffic the clamped term stays occupied
  ledger.add(2, 7, 0, 1.0);
  CHECK(delta(ledger, Subworld{6}, 2, 0) ==
        Catch::Approx(std::log(4.0) - std::log(2.0)));
}

TEST_CASE("delta is zero at unoccupied cells and for absent subworlds") {
  LoadLedger ledger = make_ledger(2);
  ledger.add(2, 6, 1, 1.0);
  CHECK(delta(ledger, Subworld{6}, 2, 0) == 0.0);
  CHECK(delta(ledger, Subworld{6}, 1, 1) == 0.0);
  CHECK(delta(ledger, Subworld{42}, 2, 1) == 0.0);
}

TEST_CASE("deltas are nonnegative and sum to the subworld WLU") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    LoadLedger ledger = random_ledger(rng);
    for (NodeId d : {6, 7, 8}) {
      const Subworld w{d};
      double sum = 0.0;
      for (const DeltaRecord& rec : delta_decomposition(ledger, w)) {
        CHECK(rec.value >= 0.0);
        sum += rec.value;
      }
      const double wlu = wonderful_life_utility(ledger, w);
      CHECK(sum == Catch::Approx(wlu).epsilon(1e-12).margin(1e-12));
      CHECK(wlu <= world_utility(ledger) + 1e-12);
    }
  }
}

TEST_CASE("a packet collects each cell delta it occupies alone") {
  const char* doc = R"(
node 2 router log1p
node 4 source
node 6 destination
link 4 2
link 2 6
regime solo 4 -> 6
)";
  SimState state(parse_topology(doc), "solo", 2, 1);
  state.inject();
  state.step({{{4, 6}, NeuronAction::single(2, 1.0)}});
  RewardMap first = deposit_and_echo(state);
  CHECK(first.empty());  // nothing absorbed yet
  const double cell = std::log1p(0.5);  // window 2, load 1 at t0
  REQUIRE(state.in_flight().size() == 1);
  CHECK(state.in_flight()[0].header.delta_sum == Catch::Approx(cell));

  state.step({{{2, 6}, NeuronAction::single(6, 1.0)}});
  RewardMap rewards = deposit_and_echo(state);
  REQUIRE(rewards.size() == 2);  // source 4 and router 2 both routed it
  CHECK(rewards.at({4, 6}) == Catch::Approx(cell));
  CHECK(rewards.at({2, 6}) == Catch::Approx(cell));
}

TEST_CASE("cohort members split their cell's delta by amount") {
  const char* doc = R"(
node 2 router log1p
node 4 source
node 5 source
node 6 destination
link 4 2
link 5 2
link 2 6
regime both 4 -> 6
regime both 5 -> 6
)";
  SimState state(parse_topology(doc), "both", 1, 1);
  state.inject();
  state.step({{{4, 6}, NeuronAction::single(2, 1.0)},
              {{5, 6}, NeuronAction::single(2, 1.0)}});
  deposit_and_echo(state);
  const double cell = std::log(3.0);  // both packets resident, window 1
  for (const Packet& p : state.in_flight())
    CHECK(p.header.delta_sum == Catch::Approx(cell / 2.0));

  state.step({{{2, 6}, NeuronAction::single(6, 2.0)}});
  RewardMap rewards = deposit_and_echo(state);
  // the echo re-assembles the full cell delta from the cohort's shares
  CHECK(rewards.at({2, 6}) == Catch::Approx(cell));
  CHECK(rewards.at({4, 6}) == Catch::Approx(cell));
  CHECK(rewards.at({5, 6}) == Catch::Approx(cell));
}

TEST_CASE("echoes keep subworlds separate") {
  const char* doc = R"(
node 2 router log1p
node 4 source
node 6 destination
node 7 destination
link 4 2
link 2 6
link 2 7
regime pairwise 4 -> 6,7
)";
  SimState state(parse_topology(doc), "pairwise", 1, 1);
  state.inject();
  state.step({{{4, 6}, NeuronAction::single(2, 1.0)},
              {{4, 7}, NeuronAction::single(2, 1.0)}});
  deposit_and_echo(state);
  state.step({{{2, 6}, NeuronAction::single(6, 1.0)},
              {{2, 7}, NeuronAction::single(7, 1.0)}});
  RewardMap rewards = deposit_and_echo(state);
  // each subworld's delta at the shared cell: log(3) - log(2)
  const double each = std::log(3.0) - std::log(2.0);
  CHECK(rewards.at({4, 6}) == Catch::Approx(each));
  CHECK(rewards.at({4, 7}) == Catch::Approx(each));
  CHECK(rewards.at({2, 6}) == Catch::Approx(each));
  CHECK(rewards.at({2, 7}) == Catch::Approx(each));
}

TEST_CASE("deposit_and_echo before any step is rejected") {
  const char* doc = R"(
node 2 router log1p
node 4 source
node 6 destination
link 4 2
link 2 6
regime solo 4 -> 6
)";
  SimState state(parse_topology(doc), "solo", 2, 1);
  CHECK_THROWS_AS(deposit_and_echo(state), EngineError);
}
