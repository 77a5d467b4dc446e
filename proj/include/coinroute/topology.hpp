#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace coinroute {

using NodeId = int;
using Timestep = int;

enum class NodeRole { source, router, destination };

enum class DelayFnKind { power, log1p };

/// Load-to-delay function attached to a router. `power` maps a window-averaged
/// load x to x^parameter, `log1p` to ln(x + 1). Both are zero at zero load and
/// nondecreasing for x >= 0, which the rest of the library relies on.
struct DelayFnSpec {
  DelayFnKind kind = DelayFnKind::log1p;
  double parameter = 0.0;  // exponent for power; unused for log1p

  friend bool operator==(const DelayFnSpec&, const DelayFnSpec&) = default;
};

/// Evaluates a delay function at load x >= 0.
inline double delay_at(const DelayFnSpec& spec, double x) {
  if (x < 0.0) throw std::domain_error("delay_at: negative load");
  switch (spec.kind) {
    case DelayFnKind::power:
      return std::pow(x, spec.parameter);
    case DelayFnKind::log1p:
      return std::log1p(x);
  }
  throw std::logic_error("delay_at: unknown kind");
}

struct NodeSpec {
  NodeId id = 0;
  NodeRole role = NodeRole::router;
  std::optional<DelayFnSpec> delay_fn;  // present iff role == router

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct Link {
  NodeId from = 0;
  NodeId to = 0;

  friend auto operator<=>(const Link&, const Link&) = default;
};

struct RegimePair {
  NodeId source = 0;
  NodeId destination = 0;

  friend auto operator<=>(const RegimePair&, const RegimePair&) = default;
};

/// Syntax error in a topology document; carries the 1-based line number.
struct ParseError : std::runtime_error {
  ParseError(int line_no, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + message),
        line(line_no) {}
  int line;
};

/// A structural invariant does not hold; the message names the violation.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const char* role_name(NodeRole role) {
  switch (role) {
    case NodeRole::source: return "source";
    case NodeRole::router: return "router";
    case NodeRole::destination: return "destination";
  }
  return "?";
}

/// A validated feedforward routing network: nodes, directed links, and named
/// traffic regimes (lists of source -> destination pairings). Instances are
/// immutable after construction and safe to share across threads.
class NetworkTopology {
 public:
  using RegimeMap = std::map<std::string, std::vector<RegimePair>>;

  NetworkTopology(std::vector<NodeSpec> nodes, std::vector<Link> links,
                  RegimeMap regimes)
      : nodes_(std::move(nodes)),
        links_(std::move(links)),
        regimes_(std::move(regimes)) {
    canonicalize();
    validate();
  }

  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const RegimeMap& regimes() const { return regimes_; }

  bool has_node(NodeId id) const { return by_id_.count(id) != 0; }

  const NodeSpec& node(NodeId id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end())
      throw ValidationError("unknown node id " + std::to_string(id));
    return nodes_[it->second];
  }

  NodeRole role(NodeId id) const { return node(id).role; }

  const DelayFnSpec& delay_fn(NodeId id) const {
    const NodeSpec& spec = node(id);
    if (!spec.delay_fn)
      throw ValidationError("node " + std::to_string(id) +
                            " has no delay function");
    return *spec.delay_fn;
  }

  /// Outgoing link targets in ascending id order.
  const std::vector<NodeId>& outgoing(NodeId id) const {
    node(id);
    return out_.at(id);
  }

  const std::vector<NodeId>& incoming(NodeId id) const {
    node(id);
    return in_.at(id);
  }

  /// All router-role node ids, ascending.
  const std::vector<NodeId>& routers() const { return routers_; }

  const std::vector<RegimePair>& regime_pairs(const std::string& name) const {
    auto it = regimes_.find(name);
    if (it == regimes_.end())
      throw ValidationError("unknown regime '" + name + "'");
    return it->second;
  }

  friend bool operator==(const NetworkTopology& a, const NetworkTopology& b) {
    return a.nodes_ == b.nodes_ && a.links_ == b.links_ &&
           a.regimes_ == b.regimes_;
  }

 private:
  void canonicalize() {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
    std::sort(links_.begin(), links_.end());
    for (auto& [name, pairs] : regimes_) std::sort(pairs.begin(), pairs.end());
  }

  void validate() {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!by_id_.emplace(nodes_[i].id, i).second)
        throw ValidationError("duplicate node id " +
                              std::to_string(nodes_[i].id));
    }
    for (const NodeSpec& n : nodes_) {
      const bool is_router = n.role == NodeRole::router;
      if (is_router && !n.delay_fn)
        throw ValidationError("router " + std::to_string(n.id) +
                              " is missing a delay function");
      if (!is_router && n.delay_fn)
        throw ValidationError(std::string(role_name(n.role)) + " " +
                              std::to_string(n.id) +
                              " must not declare a delay function");
      if (n.delay_fn && n.delay_fn->kind == DelayFnKind::power &&
          !(n.delay_fn->parameter > 0.0))
        throw ValidationError("router " + std::to_string(n.id) +
                              ": power exponent must be positive");
      out_[n.id];
      in_[n.id];
    }

    std::set<Link> seen_links;
    for (const Link& l : links_) {
      if (!has_node(l.from) || !has_node(l.to))
        throw ValidationError("link " + std::to_string(l.from) + " -> " +
                              std::to_string(l.to) +
                              " references an undeclared node");
      if (!seen_links.insert(l).second)
        throw ValidationError("duplicate link " + std::to_string(l.from) +
                              " -> " + std::to_string(l.to));
      out_[l.from].push_back(l.to);
      in_[l.to].push_back(l.from);
    }
    for (auto& [id, targets] : out_) std::sort(targets.begin(), targets.end());
    for (auto& [id, sources] : in_) std::sort(sources.begin(), sources.end());

    for (const NodeSpec& n : nodes_) {
      if (n.role == NodeRole::source && !in_.at(n.id).empty())
        throw ValidationError("source " + std::to_string(n.id) +
                              " has an incoming link");
      if (n.role == NodeRole::destination && !out_.at(n.id).empty())
        throw ValidationError("destination " + std::to_string(n.id) +
                              " has an outgoing link");
      if (n.role == NodeRole::router) routers_.push_back(n.id);
    }

    check_acyclic();

    for (const auto& [name, pairs] : regimes_) {
      std::set<RegimePair> seen;
      for (const RegimePair& p : pairs) {
        if (!seen.insert(p).second)
          throw ValidationError("regime '" + name + "': duplicate pair (" +
                                std::to_string(p.source) + ", " +
                                std::to_string(p.destination) + ")");
        if (role(p.source) != NodeRole::source)
          throw ValidationError("regime '" + name + "': node " +
                                std::to_string(p.source) + " is not a source");
        if (role(p.destination) != NodeRole::destination)
          throw ValidationError("regime '" + name + "': node " +
                                std::to_string(p.destination) +
                                " is not a destination");
        if (!reachable(p.source, p.destination))
          throw ValidationError("regime '" + name + "': no path from " +
                                std::to_string(p.source) + " to " +
                                std::to_string(p.destination));
      }
    }
  }

  void check_acyclic() const {
    // DFS three-coloring; any back edge means a cycle.
    std::map<NodeId, int> color;  // 0 white, 1 grey, 2 black
    for (const NodeSpec& n : nodes_) color[n.id] = 0;
    std::vector<std::pair<NodeId, std::size_t>> stack;
    for (const NodeSpec& n : nodes_) {
      if (color[n.id] != 0) continue;
      stack.push_back({n.id, 0});
      color[n.id] = 1;
      while (!stack.empty()) {
        auto& [id, next] = stack.back();
        const auto& targets = out_.at(id);
        if (next < targets.size()) {
          NodeId t = targets[next++];
          if (color[t] == 1) throw ValidationError("cycle detected");
          if (color[t] == 0) {
            color[t] = 1;
            stack.push_back({t, 0});
          }
        } else {
          color[id] = 2;
          stack.pop_back();
        }
      }
    }
  }

  bool reachable(NodeId from, NodeId to) const {
    std::set<NodeId> visited{from};
    std::vector<NodeId> frontier{from};
    while (!frontier.empty()) {
      NodeId id = frontier.back();
      frontier.pop_back();
      if (id == to) return true;
      for (NodeId t : out_.at(id))
        if (visited.insert(t).second) frontier.push_back(t);
    }
    return false;
  }

  std::vector<NodeSpec> nodes_;
  std::vector<Link> links_;
  RegimeMap regimes_;
  std::map<NodeId, std::size_t> by_id_;
  std::map<NodeId, std::vector<NodeId>> out_;
  std::map<NodeId, std::vector<NodeId>> in_;
  std::vector<NodeId> routers_;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline int parse_node_id(const std::string& token, int line_no) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(token, &pos);
  } catch (const std::exception&) {
    throw ParseError(line_no, "expected a node id, got '" + token + "'");
  }
  if (pos != token.size())
    throw ParseError(line_no, "expected a node id, got '" + token + "'");
  return value;
}

}  // namespace detail

/// Parses a topology document. Line-oriented, '#' starts a comment:
///
///   node <id> <source|router|destination> [power <exp> | log1p]
///   link <from> <to>
///   regime <name> <source-id> -> <dest-id>[,<dest-id>...]
///
/// Throws ParseError on malformed lines and ValidationError when the parsed
/// network violates a structural invariant.
inline NetworkTopology parse_topology(const std::string& text) {
  std::vector<NodeSpec> nodes;
  std::vector<Link> links;
  NetworkTopology::RegimeMap regimes;
  std::set<std::pair<std::string, NodeId>> regime_lines;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;

    const std::string& directive = tokens[0];
    if (directive == "node") {
      if (tokens.size() < 3)
        throw ParseError(line_no, "node needs an id and a role");
      NodeSpec spec;
      spec.id = detail::parse_node_id(tokens[1], line_no);
      const std::string& role = tokens[2];
      if (role == "source") {
        spec.role = NodeRole::source;
      } else if (role == "router") {
        spec.role = NodeRole::router;
      } else if (role == "destination") {
        spec.role = NodeRole::destination;
      } else {
        throw ParseError(line_no, "unknown role '" + role + "'");
      }
      std::size_t next = 3;
      if (spec.role == NodeRole::router) {
        if (next >= tokens.size())
          throw ParseError(line_no, "router needs a delay function");
        if (tokens[next] == "power") {
          if (next + 1 >= tokens.size())
            throw ParseError(line_no, "power needs an exponent");
          try {
            spec.delay_fn = DelayFnSpec{DelayFnKind::power,
                                        std::stod(tokens[next + 1])};
          } catch (const std::exception&) {
            throw ParseError(line_no,
                             "bad exponent '" + tokens[next + 1] + "'");
          }
          next += 2;
        } else if (tokens[next] == "log1p") {
          spec.delay_fn = DelayFnSpec{DelayFnKind::log1p, 0.0};
          next += 1;
        } else {
          throw ParseError(line_no,
                           "unknown delay function '" + tokens[next] + "'");
        }
      }
      if (next != tokens.size())
        throw ParseError(line_no, "unexpected token '" + tokens[next] + "'");
      nodes.push_back(spec);
    } else if (directive == "link") {
      if (tokens.size() != 3)
        throw ParseError(line_no, "link needs exactly two node ids");
      links.push_back({detail::parse_node_id(tokens[1], line_no),
                       detail::parse_node_id(tokens[2], line_no)});
    } else if (directive == "regime") {
      if (tokens.size() < 5 || tokens[3] != "->")
        throw ParseError(line_no,
                         "regime format: regime <name> <source> -> <dests>");
      const std::string& name = tokens[1];
      NodeId source = detail::parse_node_id(tokens[2], line_no);
      if (!regime_lines.insert({name, source}).second)
        throw ParseError(line_no, "regime '" + name +
                                      "' already has a line for source " +
                                      std::to_string(source));
      std::string dest_list;
      for (std::size_t i = 4; i < tokens.size(); ++i) dest_list += tokens[i];
      std::vector<NodeId> dests;
      std::string item;
      std::istringstream ds(dest_list);
      while (std::getline(ds, item, ',')) {
        if (item.empty())
          throw ParseError(line_no, "empty destination in list");
        dests.push_back(detail::parse_node_id(item, line_no));
      }
      if (dests.empty()) throw ParseError(line_no, "no destinations listed");
      for (NodeId d : dests) regimes[name].push_back({source, d});
    } else {
      throw ParseError(line_no, "unknown directive '" + directive + "'");
    }
  }
  return NetworkTopology(std::move(nodes), std::move(links),
                         std::move(regimes));
}

/// Renders a topology back into document form. parse(serialize(t)) == t.
inline std::string serialize_topology(const NetworkTopology& topo) {
  std::ostringstream out;
  for (const NodeSpec& n : topo.nodes()) {
    out << "node " << n.id << ' ' << role_name(n.role);
    if (n.delay_fn) {
      if (n.delay_fn->kind == DelayFnKind::power)
        out << " power " << detail::format_double(n.delay_fn->parameter);
      else
        out << " log1p";
    }
    out << '\n';
  }
  for (const Link& l : topo.links())
    out << "link " << l.from << ' ' << l.to << '\n';
  for (const auto& [name, pairs] : topo.regimes()) {
    std::map<NodeId, std::vector<NodeId>> by_source;
    for (const RegimePair& p : pairs)
      by_source[p.source].push_back(p.destination);
    for (const auto& [source, dests] : by_source) {
      out << "regime " << name << ' ' << source << " -> ";
      for (std::size_t i = 0; i < dests.size(); ++i)
        out << (i ? "," : "") << dests[i];
      out << '\n';
    }
  }
  return out.str();
}

/// All simple directed paths from source to destination, each a node-id
/// sequence, in lexicographic order. Empty when unreachable.
inline std::vector<std::vector<NodeId>> enumerate_paths(
    const NetworkTopology& topo, NodeId source, NodeId destination) {
  topo.node(source);
  topo.node(destination);
  std::vector<std::vector<NodeId>> paths;
  std::vector<NodeId> current{source};
  // Neighbors are stored ascending, so depth-first traversal emits paths in
  // lexicographic order directly.
  auto dfs = [&](auto&& self, NodeId at) -> void {
    if (at == destination) {
      paths.push_back(current);
      return;
    }
    for (NodeId next : topo.outgoing(at)) {
      current.push_back(next);
      self(self, next);
      current.pop_back();
    }
  };
  dfs(dfs, source);
  return paths;
}

/// Longest path length in hops over all listed pairs, taken over every simple
/// path; used by the harness to stop injection early enough that every packet
/// can drain.
inline int max_route_hops(const NetworkTopology& topo,
                          const std::vector<RegimePair>& pairs) {
  int hops = 0;
  for (const RegimePair& p : pairs)
    for (const auto& path : enumerate_paths(topo, p.source, p.destination))
      hops = std::max(hops, static_cast<int>(path.size()) - 1);
  return hops;
}

}  // namespace coinroute
