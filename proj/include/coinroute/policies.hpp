#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "coinroute/actions.hpp"
#include "coinroute/learner.hpp"
#include "coinroute/topology.hpp"

namespace coinroute {

/// A policy asked for something it cannot do: no route exists, or its
/// knowledge is missing a router it needs to price.
struct PolicyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What every decider sees at decision time: the window-averaged load of each
/// router as of the previous step, assumed to still hold this step. The
/// window length is carried along so a policy can fold its own traffic into a
/// predicted window.
struct Knowledge {
  std::map<NodeId, double> window_loads;
  int window_length = 1;
};

/// Snapshot of the ledger as seen by deciders at time t: every router's
/// window-averaged load at t - 1 (all zeros at t = 0).
inline Knowledge knowledge_at(const LoadLedger& ledger, Timestep t) {
  Knowledge k;
  k.window_length = ledger.window();
  for (NodeId r : ledger.router_ids())
    k.window_loads[r] = ledger.windowed_load(r, t - 1);
  return k;
}

namespace detail {

inline double known_load(const Knowledge& k, NodeId router) {
  auto it = k.window_loads.find(router);
  if (it == k.window_loads.end())
    throw PolicyError("knowledge has no load for router " +
                      std::to_string(router));
  return it->second;
}

}  // namespace detail

/// Window-averaged load router r would show if this neuron's traffic joined
/// it for one step.
inline double predicted_window_load(const Knowledge& k, NodeId router,
                                    double traffic) {
  return detail::known_load(k, router) + traffic / k.window_length;
}

/// The delay share this neuron's traffic would pay along a path: for each
/// router after the first node, its fraction of the predicted window times
/// the delay at that window.
inline double spa_path_cost(const std::vector<NodeId>& path, double traffic,
                            const Knowledge& k, const NetworkTopology& topo) {
  double cost = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (topo.role(path[i]) != NodeRole::router) continue;
    const double predicted = predicted_window_load(k, path[i], traffic);
    cost += traffic / predicted * delay_at(topo.delay_fn(path[i]), predicted);
  }
  return cost;
}

/// The predicted increase in total delay along a path: for each router after
/// the first node, delay at the predicted window minus delay at the known
/// window. This is the action-dependent part of one-step predicted world
/// utility, so ranking paths by it ranks them by predicted world utility.
inline double coin_path_cost(const std::vector<NodeId>& path, double traffic,
                             const Knowledge& k, const NetworkTopology& topo) {
  double cost = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (topo.role(path[i]) != NodeRole::router) continue;
    const DelayFnSpec& fn = topo.delay_fn(path[i]);
    cost += delay_at(fn, predicted_window_load(k, path[i], traffic)) -
            delay_at(fn, detail::known_load(k, path[i]));
  }
  return cost;
}

namespace detail {

template <typename CostFn>
NeuronAction choose_min_cost_path(const NeuronId& neuron, double traffic,
                                  const NetworkTopology& topo, CostFn cost) {
  if (!(traffic > 0.0))
    throw std::invalid_argument("traffic must be positive");
  const auto paths = enumerate_paths(topo, neuron.router, neuron.destination);
  if (paths.empty())
    throw PolicyError("no route from " + std::to_string(neuron.router) +
                      " to " + std::to_string(neuron.destination));
  std::size_t best = 0;
  double best_cost = cost(paths[0]);
  for (std::size_t i = 1; i < paths.size(); ++i) {
    const double c = cost(paths[i]);
    // strict comparison: ties keep the lexicographically smallest path
    if (c < best_cost) {
      best = i;
      best_cost = c;
    }
  }
  return NeuronAction::single(paths[best][1], traffic);
}

}  // namespace detail

/// Full-knowledge shortest path: sends the whole amount down the path with
/// the smallest predicted own delay share.
inline NeuronAction fk_spa_choose(const NeuronId& neuron, double traffic,
                                  const Knowledge& k,
                                  const NetworkTopology& topo) {
  return detail::choose_min_cost_path(
      neuron, traffic, topo,
      [&](const std::vector<NodeId>& path) {
        return spa_path_cost(path, traffic, k, topo);
      });
}

/// Full-knowledge wonderful-life routing: sends the whole amount down the
/// path with the smallest predicted increase in total delay, i.e. the best
/// one-step predicted world utility.
inline NeuronAction fk_coin_choose(const NeuronId& neuron, double traffic,
                                   const Knowledge& k,
                                   const NetworkTopology& topo) {
  return detail::choose_min_cost_path(
      neuron, traffic, topo,
      [&](const std::vector<NodeId>& path) {
        return coin_path_cost(path, traffic, k, topo);
      });
}

/// The input vector a memory-based neuron records for an action: the
/// allocation spread over the node's outgoing links in ascending target
/// order.
inline std::vector<double> encode_allocation(const NetworkTopology& topo,
                                             NodeId at,
                                             const NeuronAction& action) {
  const auto& out = topo.outgoing(at);
  std::vector<double> encoded(out.size(), 0.0);
  for (const auto& [target, amount] : action.allocation) {
    const auto it = std::find(out.begin(), out.end(), target);
    if (it == out.end())
      throw PolicyError("no link " + std::to_string(at) + " -> " +
                        std::to_string(target));
    encoded[it - out.begin()] += amount;
  }
  return encoded;
}

/// Memory-based wonderful-life routing. Predicts the echoed reward (a cost)
/// of sending everything down each viable link with a single-nearest-neighbor
/// lookup, then flips a fair coin between the best-predicted link and the
/// full-knowledge shortest-path choice. An empty memory falls back to the
/// shortest-path choice without drawing.
inline NeuronAction mb_coin_choose(const NeuronId& neuron, double traffic,
                                   const LearnerMemory& memory,
                                   const Knowledge& k,
                                   const NetworkTopology& topo,
                                   std::mt19937_64& rng) {
  NeuronAction spa = fk_spa_choose(neuron, traffic, k, topo);
  if (memory.empty()) return spa;
  const auto& out = topo.outgoing(neuron.router);
  if (memory.dimension() != out.size())
    throw PolicyError("memory dimension does not match out-degree of node " +
                      std::to_string(neuron.router));
  bool found = false;
  std::size_t best = 0;
  double best_predicted = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] != neuron.destination &&
        enumerate_paths(topo, out[i], neuron.destination).empty())
      continue;
    std::vector<double> candidate(out.size(), 0.0);
    candidate[i] = traffic;
    const double predicted = nn_predict(memory, candidate);
    // strict comparison: ties keep the smallest link target
    if (!found || predicted < best_predicted) {
      found = true;
      best = i;
      best_predicted = predicted;
    }
  }
  if (!found)
    throw PolicyError("no route from " + std::to_string(neuron.router) +
                      " to " + std::to_string(neuron.destination));
  const bool take_learner = (rng() & 1ull) == 0;
  return take_learner ? NeuronAction::single(out[best], traffic) : spa;
}

}  // namespace coinroute
