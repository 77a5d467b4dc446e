// coin-route: run the routing experiments from the command line.
//
//   coin-route run --network a --load medium --algo fk-coin --out summary.csv
//   coin-route sweep --out summary.csv --series-out series.csv
//   coin-route validate my-network.topo
//
// Exit codes: 0 success, 1 configuration or validation problem, 2 runtime
// failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coinroute/coinroute.hpp"

namespace {

coinroute::NetworkTopology load_network(const std::string& name) {
  if (name == "a" || name == "b")
    return coinroute::defaults::bundled_topology(name);
  std::ifstream in(name);
  if (!in)
    throw coinroute::ConfigError("cannot open topology file '" + name + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return coinroute::parse_topology(buffer.str());
}

struct SharedOptions {
  int window = 50;
  int steps = 200;
  int runs = 50;
  std::uint64_t seed = 1;
  std::size_t capacity = 32;
  std::string out;
  std::string series_out;
};

void add_shared(CLI::App* cmd, SharedOptions& opts, bool out_required) {
  cmd->add_option("--window", opts.window, "Averaging window length")
      ->capture_default_str();
  cmd->add_option("--steps", opts.steps, "Timesteps per run")
      ->capture_default_str();
  cmd->add_option("--runs", opts.runs, "Replicas per experiment")
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Base seed; replica i uses seed + i")
      ->capture_default_str();
  cmd->add_option("--capacity", opts.capacity,
                  "Memory samples kept per neuron (mb-coin); 0 = unbounded")
      ->capture_default_str();
  auto* out = cmd->add_option("--out", opts.out, "Summary CSV path");
  if (out_required) out->required();
  cmd->add_option("--series-out", opts.series_out,
                  "Per-timestep series CSV path");
}

coinroute::ExperimentConfig make_config(const std::string& network,
                                        const std::string& regime,
                                        const std::string& algo,
                                        const SharedOptions& opts) {
  coinroute::ExperimentConfig cfg{
      .topology = load_network(network),
      .network = network,
      .regime = regime,
      .algorithm = coinroute::parse_algorithm(algo),
      .window = opts.window,
      .steps = opts.steps,
      .runs = opts.runs,
      .base_seed = opts.seed,
      .memory_capacity = opts.capacity == 0
                             ? std::nullopt
                             : std::optional<std::size_t>(opts.capacity),
  };
  coinroute::validate_config(cfg);
  return cfg;
}

void report_line(const coinroute::ExperimentConfig& cfg,
                 const coinroute::RunStats& stats) {
  std::printf("%s/%s/%s: mean delay %.4f +/- %.4f over %d runs\n",
              cfg.network.c_str(), cfg.regime.c_str(),
              coinroute::algorithm_name(cfg.algorithm), stats.mean_delay,
              stats.sem, cfg.runs);
}

void write_results(const coinroute::ResultSet& results,
                   const SharedOptions& opts) {
  std::optional<std::string> series;
  if (!opts.series_out.empty()) series = opts.series_out;
  coinroute::emit_results(results, opts.out, series);
  std::printf("wrote %s\n", opts.out.c_str());
  if (series) std::printf("wrote %s\n", series->c_str());
}

int run_command(const std::string& network, const std::string& regime,
                const std::string& algo, const SharedOptions& opts) {
  coinroute::ExperimentConfig cfg = make_config(network, regime, algo, opts);
  coinroute::RunStats stats = coinroute::run_experiment(cfg);
  report_line(cfg, stats);
  coinroute::ResultSet results;
  results.emplace_back(std::move(cfg), std::move(stats));
  write_results(results, opts);
  return 0;
}

int sweep_command(const std::vector<std::string>& networks,
                  const SharedOptions& opts) {
  static const std::vector<std::string> kRegimes{"light", "medium", "heavy"};
  static const std::vector<std::string> kAlgos{"fk-spa", "fk-coin", "mb-coin"};
  coinroute::ResultSet results;
  for (const std::string& network : networks) {
    for (const std::string& regime : kRegimes) {
      for (const std::string& algo : kAlgos) {
        coinroute::ExperimentConfig cfg =
            make_config(network, regime, algo, opts);
        coinroute::RunStats stats = coinroute::run_experiment(cfg);
        report_line(cfg, stats);
        results.emplace_back(std::move(cfg), std::move(stats));
      }
    }
  }
  write_results(results, opts);
  return 0;
}

int validate_command(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw coinroute::ConfigError("cannot open topology file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  coinroute::NetworkTopology topo = coinroute::parse_topology(buffer.str());
  std::printf("%s: ok (%zu nodes, %zu links)\n", path.c_str(),
              topo.nodes().size(), topo.links().size());
  for (const auto& [name, pairs] : topo.regimes()) {
    std::printf("  regime %s:", name.c_str());
    for (const coinroute::RegimePair& p : pairs) {
      const auto paths =
          coinroute::enumerate_paths(topo, p.source, p.destination);
      std::printf(" %d->%d (%zu paths)", p.source, p.destination,
                  paths.size());
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic multi-router traffic experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment");
  std::string network = "a";
  std::string regime = "light";
  std::string algo = "fk-spa";
  SharedOptions run_opts;
  run->add_option("--network", network, "Bundled network (a, b) or a file path")
      ->required();
  run->add_option("--load", regime, "Traffic regime (light, medium, heavy)")
      ->required();
  run->add_option("--algo", algo, "fk-spa, fk-coin, or mb-coin")->required();
  add_shared(run, run_opts, /*out_required=*/true);

  auto* sweep = app.add_subcommand(
      "sweep", "Run the full network x regime x algorithm cross-product");
  std::vector<std::string> sweep_networks{"a", "b"};
  SharedOptions sweep_opts;
  sweep->add_option("--network", sweep_networks,
                    "Networks to sweep (default: a b)");
  add_shared(sweep, sweep_opts, /*out_required=*/true);

  auto* validate = app.add_subcommand("validate", "Check a topology file");
  std::string topo_path;
  validate->add_option("file", topo_path, "Topology file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return run_command(network, regime, algo, run_opts);
    if (sweep->parsed()) return sweep_command(sweep_networks, sweep_opts);
    if (validate->parsed()) return validate_command(topo_path);
  } catch (const coinroute::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const coinroute::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const coinroute::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
