#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coinroute/engine.hpp"
#include "coinroute/learner.hpp"
#include "coinroute/policies.hpp"
#include "coinroute/stats.hpp"
#include "coinroute/wlu.hpp"

namespace coinroute {

/// Bad experiment parameters (unknown algorithm, missing regime, degenerate
/// counts). Maps to exit code 1 in the command-line tool.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Could not read or write a results file. Maps to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Algorithm { fk_spa, fk_coin, mb_coin };

inline Algorithm parse_algorithm(const std::string& name) {
  if (name == "fk-spa") return Algorithm::fk_spa;
  if (name == "fk-coin") return Algorithm::fk_coin;
  if (name == "mb-coin") return Algorithm::mb_coin;
  throw ConfigError("unknown algorithm '" + name + "'");
}

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::fk_spa: return "fk-spa";
    case Algorithm::fk_coin: return "fk-coin";
    case Algorithm::mb_coin: return "mb-coin";
  }
  return "?";
}

struct ExperimentConfig {
  NetworkTopology topology;
  std::string network;  // label used in reports ("a", "b", or a file path)
  std::string regime = "light";
  Algorithm algorithm = Algorithm::fk_spa;
  int window = 50;
  int steps = 200;
  int runs = 50;
  std::uint64_t base_seed = 1;
  // mb-coin only; nullopt keeps every sample forever. The default keeps
  // predictions tracking the recent load pattern instead of freezing on the
  // first samples ever seen for each arm.
  std::optional<std::size_t> memory_capacity = 32;
};

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.window < 1) throw ConfigError("window must be >= 1");
  if (cfg.steps < 1) throw ConfigError("steps must be >= 1");
  if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
  try {
    cfg.topology.regime_pairs(cfg.regime);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

/// One replica's outcome.
struct RunResult {
  double world_delay = 0.0;        // total delay over the whole run
  double injected = 0.0;           // total amount injected
  double mean_packet_delay = 0.0;  // world_delay / injected
  std::vector<double> step_delay;  // total delay per step, length = steps
};

/// Runs a single replica with the given seed. Each step: inject (while new
/// packets can still drain before the run ends), collect an action per
/// neuron with resident traffic, advance the engine, and run the reward
/// protocol. Memory-based neurons then learn from whatever was echoed back.
inline RunResult run_single(const ExperimentConfig& cfg, std::uint64_t seed) {
  validate_config(cfg);
  const NetworkTopology& topo = cfg.topology;
  SimState state(topo, cfg.regime, cfg.window, seed);
  const int drain =
      max_route_hops(topo, state.active_pairs());
  const int last_injection = std::max(0, cfg.steps - drain);

  const bool learning = cfg.algorithm == Algorithm::mb_coin;
  std::map<NeuronId, LearnerMemory> memories;
  std::map<std::pair<NeuronId, Timestep>, std::vector<double>> action_log;

  RunResult result;
  result.step_delay.resize(cfg.steps, 0.0);
  for (Timestep t = 0; t < cfg.steps; ++t) {
    if (t <= last_injection) state.inject();
    const Knowledge knowledge = knowledge_at(state.ledger(), t);
    ActionMap actions;
    for (const auto& [neuron, traffic] : state.pending_traffic()) {
      NeuronAction action;
      switch (cfg.algorithm) {
        case Algorithm::fk_spa:
          action = fk_spa_choose(neuron, traffic, knowledge, topo);
          break;
        case Algorithm::fk_coin:
          action = fk_coin_choose(neuron, traffic, knowledge, topo);
          break;
        case Algorithm::mb_coin: {
          auto mem = memories.find(neuron);
          if (mem == memories.end()) {
            mem = memories
                      .emplace(neuron,
                               LearnerMemory(topo.outgoing(neuron.router).size(),
                                             cfg.memory_capacity))
                      .first;
          }
          action = mb_coin_choose(neuron, traffic, mem->second, knowledge,
                                  topo, state.rng());
          break;
        }
      }
      if (learning)
        action_log[{neuron, t}] = encode_allocation(topo, neuron.router, action);
      actions.emplace(neuron, std::move(action));
    }
    state.step(actions);
    const RewardMap rewards = deposit_and_echo(state);
    result.step_delay[t] = step_utility(state.ledger(), t);

    if (learning) {
      // Every decision that routed an absorbed packet gets that packet's
      // destination echo, once per (neuron, decision step).
      std::set<std::pair<NeuronId, Timestep>> updates;
      for (const Packet& p : state.absorbed_last_step())
        for (const HopRecord& hop : p.trace)
          if (hop.departed)
            updates.insert({{hop.node, p.destination}, *hop.departed});
      for (const auto& [neuron, when] : updates) {
        const double reward = rewards.at({neuron.router, neuron.destination});
        nn_update(memories.at(neuron), action_log.at({neuron, when}), reward);
      }
    }
  }

  for (double d : result.step_delay) result.world_delay += d;
  result.injected = state.injected_amount();
  result.mean_packet_delay =
      result.injected > 0.0 ? result.world_delay / result.injected : 0.0;
  return result;
}

/// Aggregate over replicas.
struct RunStats {
  std::vector<double> per_run_delay;   // mean packet delay, one per replica
  double mean_delay = 0.0;
  double sem = 0.0;                    // 0 when runs == 1
  std::vector<double> mean_step_delay; // averaged over replicas
};

/// Runs cfg.runs replicas seeded base_seed, base_seed + 1, ... and averages.
inline RunStats run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RunStats stats;
  stats.mean_step_delay.resize(cfg.steps, 0.0);
  for (int run = 0; run < cfg.runs; ++run) {
    const RunResult result = run_single(cfg, cfg.base_seed + run);
    stats.per_run_delay.push_back(result.mean_packet_delay);
    for (int t = 0; t < cfg.steps; ++t)
      stats.mean_step_delay[t] += result.step_delay[t];
  }
  for (double& d : stats.mean_step_delay) d /= cfg.runs;
  stats.mean_delay = mean(stats.per_run_delay);
  stats.sem = cfg.runs > 1 ? standard_error(stats.per_run_delay) : 0.0;
  return stats;
}

using ResultSet = std::vector<std::pair<ExperimentConfig, RunStats>>;

/// Writes the summary CSV (one row per experiment) and, when a series path
/// is given, the per-timestep series CSV. Numbers are printed with enough
/// digits to round-trip exactly.
inline void emit_results(const ResultSet& results,
                         const std::string& summary_path,
                         const std::optional<std::string>& series_path =
                             std::nullopt) {
  std::ofstream summary(summary_path);
  if (!summary) throw IoError("cannot write " + summary_path);
  summary << "network,regime,algorithm,runs,steps,window,seed,mean_delay,sem\n";
  for (const auto& [cfg, stats] : results) {
    summary << cfg.network << ',' << cfg.regime << ','
            << algorithm_name(cfg.algorithm) << ',' << cfg.runs << ','
            << cfg.steps << ',' << cfg.window << ',' << cfg.base_seed << ','
            << detail::format_double(stats.mean_delay) << ','
            << detail::format_double(stats.sem) << '\n';
  }
  if (!summary.flush()) throw IoError("failed writing " + summary_path);

  if (!series_path) return;
  std::ofstream series(*series_path);
  if (!series) throw IoError("cannot write " + *series_path);
  series << "network,regime,algorithm,t,mean_total_delay\n";
  for (const auto& [cfg, stats] : results) {
    for (std::size_t t = 0; t < stats.mean_step_delay.size(); ++t) {
      series << cfg.network << ',' << cfg.regime << ','
             << algorithm_name(cfg.algorithm) << ',' << t << ','
             << detail::format_double(stats.mean_step_delay[t]) << '\n';
    }
  }
  if (!series.flush()) throw IoError("failed writing " + *series_path);
}

}  // namespace coinroute
