#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "coinroute/actions.hpp"
#include "coinroute/ledger.hpp"

namespace coinroute {

/// Engine-level failure: a missing or malformed action, routing along a link
/// that does not exist, or sending traffic somewhere it can no longer reach
/// its destination.
struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Running reward bookkeeping carried by each packet: the accumulated sum of
/// the per-cell utility differences deposited along its route.
struct RewardHeader {
  double delta_sum = 0.0;
};

struct HopRecord {
  NodeId node = 0;
  Timestep arrived = 0;
  std::optional<Timestep> departed;  // set once the packet leaves this node
};

struct Packet {
  double amount = 1.0;
  NodeId destination = 0;
  NodeId position = 0;
  Timestep injected_at = 0;
  RewardHeader header;
  double accrued_delay = 0.0;  // this packet's proportional share so far
  std::vector<HopRecord> trace;
};

struct CompletedTally {
  std::int64_t count = 0;
  double amount = 0.0;
  double delay = 0.0;
};

/// Discrete-time simulation state. Each step every in-flight packet advances
/// exactly one hop according to the supplied actions; arrivals at routers are
/// recorded in the ledger at the current clock, and each packet then accrues
/// its proportional share of the router's delay for the step. Packets
/// reaching a destination are absorbed. Sources and destinations never hold
/// packets across steps and never appear in the ledger.
class SimState {
 public:
  SimState(NetworkTopology topology, std::string regime, int window,
           std::uint64_t seed)
      : topology_(std::move(topology)),
        regime_(std::move(regime)),
        ledger_(LoadLedger::for_topology(topology_, window)),
        rng_(seed) {
    active_pairs_ = topology_.regime_pairs(regime_);  // validates the name
  }

  Timestep clock() const { return clock_; }
  const NetworkTopology& topology() const { return topology_; }
  const std::string& regime() const { return regime_; }
  const std::vector<RegimePair>& active_pairs() const { return active_pairs_; }
  const LoadLedger& ledger() const { return ledger_; }
  const std::vector<Packet>& in_flight() const { return in_flight_; }
  const std::vector<Packet>& absorbed_last_step() const { return absorbed_; }
  const std::map<NodeId, CompletedTally>& completed() const {
    return tallies_;
  }
  std::mt19937_64& rng() { return rng_; }

  double injected_amount() const { return injected_amount_; }
  double absorbed_amount() const { return absorbed_amount_; }
  double in_flight_amount() const {
    double sum = 0.0;
    for (const Packet& p : in_flight_) sum += p.amount;
    return sum;
  }

  /// One new packet of amount 1.0 per active regime pair, placed at its
  /// source with the current clock as injection time.
  void inject() {
    for (const RegimePair& pair : active_pairs_) {
      Packet p;
      p.amount = 1.0;
      p.destination = pair.destination;
      p.position = pair.source;
      p.injected_at = clock_;
      p.trace.push_back({pair.source, clock_, std::nullopt});
      in_flight_.push_back(std::move(p));
      injected_amount_ += 1.0;
    }
  }

  /// Resident traffic grouped by neuron: total amount at each (node,
  /// destination) pair that must act this step.
  std::map<NeuronId, double> pending_traffic() const {
    std::map<NeuronId, double> groups;
    for (const Packet& p : in_flight_)
      groups[{p.position, p.destination}] += p.amount;
    return groups;
  }

  /// Advances every in-flight packet one hop and the clock by one. `actions`
  /// must cover exactly the neurons with resident traffic, each allocating
  /// the group's full amount to a single existing link whose target can still
  /// reach the destination.
  void step(const ActionMap& actions) {
    const std::map<NeuronId, double> groups = pending_traffic();
    std::map<NeuronId, NodeId> next_hop;
    for (const auto& [neuron, traffic] : groups)
      next_hop[neuron] = resolve(neuron, traffic, actions);
    for (const auto& [neuron, action] : actions)
      if (!groups.count(neuron))
        throw EngineError("action for idle neuron (" +
                          std::to_string(neuron.router) + ", " +
                          std::to_string(neuron.destination) + ")");

    absorbed_.clear();
    std::vector<Packet> still_flying;
    still_flying.reserve(in_flight_.size());
    for (Packet& p : in_flight_) {
      const NodeId next = next_hop.at({p.position, p.destination});
      p.trace.back().departed = clock_;
      p.trace.push_back({next, clock_, std::nullopt});
      p.position = next;
      if (topology_.role(next) == NodeRole::destination) {
        absorbed_amount_ += p.amount;
        CompletedTally& tally = tallies_[next];
        tally.count += 1;
        tally.amount += p.amount;
        tally.delay += p.accrued_delay;
        absorbed_.push_back(std::move(p));
      } else {
        ledger_.add(next, p.destination, clock_, p.amount);
        still_flying.push_back(std::move(p));
      }
    }
    in_flight_ = std::move(still_flying);

    // Loads for the step are final; now each packet at a router accrues its
    // proportional share of that router's delay.
    for (Packet& p : in_flight_) {
      const NodeId r = p.position;
      const double share = p.amount / ledger_.total_load(r, clock_);
      p.accrued_delay +=
          share * delay_at(ledger_.delay_fn(r), ledger_.windowed_load(r, clock_));
    }
    ++clock_;
  }

  friend std::map<std::pair<NodeId, NodeId>, double> deposit_and_echo(
      SimState& state);

 private:
  NodeId resolve(const NeuronId& neuron, double traffic,
                 const ActionMap& actions) const {
    auto it = actions.find(neuron);
    if (it == actions.end())
      throw EngineError("no action for neuron (" +
                        std::to_string(neuron.router) + ", " +
                        std::to_string(neuron.destination) + ")");
    const NeuronAction& action = it->second;
    NodeId chosen = 0;
    int live_entries = 0;
    double allocated = 0.0;
    const auto& out = topology_.outgoing(neuron.router);
    for (const auto& [target, amount] : action.allocation) {
      if (amount < 0.0) throw EngineError("negative allocation");
      if (std::find(out.begin(), out.end(), target) == out.end())
        throw EngineError("no link " + std::to_string(neuron.router) +
                          " -> " + std::to_string(target));
      allocated += amount;
      if (amount > 0.0) {
        chosen = target;
        ++live_entries;
      }
    }
    if (live_entries == 0)
      throw EngineError("action allocates nothing for neuron (" +
                        std::to_string(neuron.router) + ", " +
                        std::to_string(neuron.destination) + ")");
    if (live_entries > 1)
      throw EngineError("split allocations are not supported");
    if (std::abs(allocated - traffic) >
        1e-12 * std::max(1.0, std::abs(traffic)))
      throw EngineError("allocation does not match resident traffic");
    if (chosen != neuron.destination &&
        enumerate_paths(topology_, chosen, neuron.destination).empty())
      throw EngineError("traffic for " + std::to_string(neuron.destination) +
                        " stranded at " + std::to_string(chosen));
    return chosen;
  }

  NetworkTopology topology_;
  std::string regime_;
  std::vector<RegimePair> active_pairs_;
  LoadLedger ledger_;
  std::mt19937_64 rng_;
  Timestep clock_ = 0;
  std::vector<Packet> in_flight_;
  std::vector<Packet> absorbed_;
  std::map<NodeId, CompletedTally> tallies_;
  double injected_amount_ = 0.0;
  double absorbed_amount_ = 0.0;
};

}  // namespace coinroute
