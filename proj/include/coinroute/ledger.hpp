#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "coinroute/topology.hpp"

namespace coinroute {

/// Complete record of tagged traffic: amount present at (router, destination,
/// timestep). This is the whole world state as far as the utilities are
/// concerned; world_utility, clamping, and the per-cell differences all read
/// off it arithmetically.
///
/// Loads at timesteps before 0 are zero, and windows always divide by the
/// window length even when they overlap that zero history.
class LoadLedger {
 public:
  LoadLedger(std::vector<std::pair<NodeId, DelayFnSpec>> routers, int window)
      : window_(window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    for (auto& [id, fn] : routers) {
      if (!records_.emplace(id, RouterRecord{fn, {}}).second)
        throw ValidationError("duplicate router " + std::to_string(id));
    }
    for (const auto& [id, rec] : records_) router_ids_.push_back(id);
  }

  static LoadLedger for_topology(const NetworkTopology& topo, int window) {
    std::vector<std::pair<NodeId, DelayFnSpec>> routers;
    for (NodeId r : topo.routers()) routers.push_back({r, topo.delay_fn(r)});
    return LoadLedger(std::move(routers), window);
  }

  int window() const { return window_; }

  /// One past the largest timestep with a recorded entry.
  Timestep horizon() const { return horizon_; }

  const std::vector<NodeId>& router_ids() const { return router_ids_; }

  bool has_router(NodeId id) const { return records_.count(id) != 0; }

  const DelayFnSpec& delay_fn(NodeId router) const {
    return record(router).fn;
  }

  /// Destinations with at least one recorded entry, ascending.
  std::vector<NodeId> destinations() const {
    std::set<NodeId> seen;
    for (const auto& [id, rec] : records_)
      for (const auto& [dest, loads] : rec.by_destination) seen.insert(dest);
    return {seen.begin(), seen.end()};
  }

  void add(NodeId router, NodeId destination, Timestep t, double amount) {
    if (t < 0) throw std::invalid_argument("negative timestep");
    if (amount < 0.0) throw std::invalid_argument("negative amount");
    auto& loads = record(router).by_destination[destination];
    if (static_cast<std::size_t>(t) >= loads.size()) loads.resize(t + 1, 0.0);
    loads[t] += amount;
    horizon_ = std::max(horizon_, t + 1);
  }

  /// Traffic tagged for `destination` at `router` during step t; 0 if absent.
  double load(NodeId router, NodeId destination, Timestep t) const {
    const auto& by_dest = record(router).by_destination;
    auto it = by_dest.find(destination);
    if (it == by_dest.end()) return 0.0;
    return at(it->second, t);
  }

  /// Total traffic at `router` during step t, summed over destinations in
  /// ascending order.
  double total_load(NodeId router, Timestep t) const {
    double total = 0.0;
    for (const auto& [dest, loads] : record(router).by_destination)
      total += at(loads, t);
    return total;
  }

  /// Mean of total_load over the window ending at t (inclusive). Steps before
  /// 0 contribute zero; negative t yields 0.
  double windowed_load(NodeId router, Timestep t) const {
    const auto& rec = record(router);
    double sum = 0.0;
    for (Timestep s = t - window_ + 1; s <= t; ++s) {
      if (s < 0) continue;
      for (const auto& [dest, loads] : rec.by_destination)
        sum += at(loads, s);
    }
    return sum / window_;
  }

  bool occupied(NodeId router, Timestep t) const {
    return total_load(router, t) > 0.0;
  }

  /// total_load with one destination's traffic left out, in the same
  /// summation order a ledger rebuilt without that destination would use.
  double total_load_excluding(NodeId router, NodeId destination,
                              Timestep t) const {
    double total = 0.0;
    for (const auto& [dest, loads] : record(router).by_destination)
      if (dest != destination) total += at(loads, t);
    return total;
  }

  double windowed_load_excluding(NodeId router, NodeId destination,
                                 Timestep t) const {
    const auto& rec = record(router);
    double sum = 0.0;
    for (Timestep s = t - window_ + 1; s <= t; ++s) {
      if (s < 0) continue;
      for (const auto& [dest, loads] : rec.by_destination)
        if (dest != destination) sum += at(loads, s);
    }
    return sum / window_;
  }

  friend bool operator==(const LoadLedger& a, const LoadLedger& b) {
    if (a.window_ != b.window_ || a.horizon_ != b.horizon_) return false;
    if (a.router_ids_ != b.router_ids_) return false;
    for (const auto& [id, rec] : a.records_) {
      const auto& other = b.records_.at(id);
      if (!(rec.fn == other.fn)) return false;
      if (rec.by_destination != other.by_destination) return false;
    }
    return true;
  }

 private:
  struct RouterRecord {
    DelayFnSpec fn;
    std::map<NodeId, std::vector<double>> by_destination;
  };

  static double at(const std::vector<double>& loads, Timestep t) {
    if (t < 0 || static_cast<std::size_t>(t) >= loads.size()) return 0.0;
    return loads[t];
  }

  const RouterRecord& record(NodeId router) const {
    auto it = records_.find(router);
    if (it == records_.end())
      throw ValidationError("unknown router " + std::to_string(router));
    return it->second;
  }

  RouterRecord& record(NodeId router) {
    auto it = records_.find(router);
    if (it == records_.end())
      throw ValidationError("unknown router " + std::to_string(router));
    return it->second;
  }

  std::map<NodeId, RouterRecord> records_;
  std::vector<NodeId> router_ids_;
  int window_ = 1;
  Timestep horizon_ = 0;
};

/// Total delay incurred during step t: every occupied router contributes its
/// delay function evaluated at its window-averaged load. Routers idle at t
/// contribute nothing even when their window is still nonzero.
inline double step_utility(const LoadLedger& ledger, Timestep t) {
  double total = 0.0;
  for (NodeId r : ledger.router_ids()) {
    if (!ledger.occupied(r, t)) continue;
    total += delay_at(ledger.delay_fn(r), ledger.windowed_load(r, t));
  }
  return total;
}

/// World utility: total delay summed over every recorded step. A cost, so
/// lower is better.
inline double world_utility(const LoadLedger& ledger) {
  double total = 0.0;
  for (Timestep t = 0; t < ledger.horizon(); ++t)
    total += step_utility(ledger, t);
  return total;
}

}  // namespace coinroute
