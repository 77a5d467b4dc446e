#pragma once

#include <map>
#include <utility>
#include <vector>

#include "coinroute/engine.hpp"
#include "coinroute/ledger.hpp"

namespace coinroute {

/// A subworld groups every neuron whose traffic shares an ultimate
/// destination. Clamping a subworld zeroes that destination's traffic
/// everywhere, across all time.
struct Subworld {
  NodeId destination = 0;

  friend auto operator<=>(const Subworld&, const Subworld&) = default;
};

/// The ledger with every entry tagged for the subworld's destination set to
/// zero. Purely arithmetic: nothing is re-simulated, every other entry is
/// untouched.
inline LoadLedger clamp(const LoadLedger& ledger, Subworld w) {
  std::vector<std::pair<NodeId, DelayFnSpec>> routers;
  for (NodeId r : ledger.router_ids()) routers.push_back({r, ledger.delay_fn(r)});
  LoadLedger out(std::move(routers), ledger.window());
  for (NodeId r : ledger.router_ids()) {
    for (NodeId d : ledger.destinations()) {
      for (Timestep t = 0; t < ledger.horizon(); ++t) {
        const double amount = d == w.destination ? 0.0 : ledger.load(r, d, t);
        out.add(r, d, t, amount);
      }
    }
  }
  return out;
}

/// Wonderful life utility of a subworld: world utility minus the world
/// utility of the clamped ledger. Like world utility it is a cost; a
/// subworld whose traffic only ever adds delay has nonnegative WLU.
inline double wonderful_life_utility(const LoadLedger& ledger, Subworld w) {
  return world_utility(ledger) - world_utility(clamp(ledger, w));
}

/// Per-cell difference: the delay router r contributes at step t minus what
/// it would contribute with subworld w clamped. Computed directly from the
/// ledger in the same summation order clamp() would produce, so summing
/// delta over all (router, step) cells reproduces the subworld's WLU
/// exactly.
inline double delta(const LoadLedger& ledger, Subworld w, NodeId router,
                    Timestep t) {
  const DelayFnSpec& fn = ledger.delay_fn(router);
  double term = 0.0;
  if (ledger.occupied(router, t))
    term = delay_at(fn, ledger.windowed_load(router, t));
  double clamped_term = 0.0;
  if (ledger.total_load_excluding(router, w.destination, t) > 0.0)
    clamped_term =
        delay_at(fn, ledger.windowed_load_excluding(router, w.destination, t));
  return term - clamped_term;
}

struct DeltaRecord {
  Subworld subworld;
  NodeId router = 0;
  Timestep t = 0;
  double value = 0.0;
};

/// Every per-cell difference for a subworld over the recorded horizon.
inline std::vector<DeltaRecord> delta_decomposition(const LoadLedger& ledger,
                                                    Subworld w) {
  std::vector<DeltaRecord> records;
  for (Timestep t = 0; t < ledger.horizon(); ++t)
    for (NodeId r : ledger.router_ids())
      records.push_back({w, r, t, delta(ledger, w, r, t)});
  return records;
}

/// Reward signals echoed back after a completed step, keyed by (node,
/// subworld destination).
using RewardMap = std::map<std::pair<NodeId, NodeId>, double>;

/// Runs the packet-header reward protocol for the step that just completed.
///
/// Every packet now resident at a router arrived there this step; it receives
/// its cohort share of that cell's utility difference into its header. Each
/// destination then sums the headers of the packets it absorbed this step and
/// echoes the sum to every node that routed any of them. Call exactly once
/// after each step(); headers straddle steps, so skipping one loses deposits.
inline RewardMap deposit_and_echo(SimState& state) {
  const Timestep t = state.clock() - 1;
  if (t < 0) throw EngineError("deposit_and_echo before any step");
  const LoadLedger& ledger = state.ledger_;

  for (Packet& p : state.in_flight_) {
    const NodeId r = p.position;
    const double cohort = ledger.load(r, p.destination, t);
    const double cell = delta(ledger, Subworld{p.destination}, r, t);
    p.header.delta_sum += (p.amount / cohort) * cell;
  }

  std::map<NodeId, double> echo;  // destination -> summed headers
  for (const Packet& p : state.absorbed_) echo[p.destination] += p.header.delta_sum;

  RewardMap rewards;
  for (const Packet& p : state.absorbed_)
    for (const HopRecord& hop : p.trace)
      if (hop.departed) rewards[{hop.node, p.destination}] = echo[p.destination];
  return rewards;
}

}  // namespace coinroute
