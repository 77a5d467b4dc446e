#pragma once

#include <map>
#include <stdexcept>

#include "coinroute/topology.hpp"

namespace coinroute {

/// Identity of one learner: the node it sits at (a source or a router) plus
/// the ultimate destination whose tagged traffic it steers. Every learner
/// sharing a destination belongs to the same subworld.
struct NeuronId {
  NodeId router = 0;
  NodeId destination = 0;

  friend auto operator<=>(const NeuronId&, const NeuronId&) = default;
};

/// How a neuron routes its resident tagged traffic this step: amounts keyed by
/// outgoing-link target. The experiments route atomically (the whole amount on
/// one link); the engine rejects anything else.
struct NeuronAction {
  std::map<NodeId, double> allocation;

  static NeuronAction single(NodeId next_hop, double amount) {
    NeuronAction a;
    a.allocation[next_hop] = amount;
    return a;
  }

  double total() const {
    double sum = 0.0;
    for (const auto& [target, amount] : allocation) sum += amount;
    return sum;
  }
};

using ActionMap = std::map<NeuronId, NeuronAction>;

}  // namespace coinroute
