#pragma once

#include <string>
#include <string_view>

#include "coinroute/harness.hpp"
#include "coinroute/topology.hpp"

namespace coinroute::defaults {

/// Bundled two-destination network. Source 4 chooses between its private
/// cubic router 1 and the shared log1p router 2 for destination 6; all other
/// pairs are forced through router 2, so the bottleneck always carries
/// background traffic. Router 3 offers source 5 a longer detour into 2.
inline constexpr const char* kNetworkA = R"(# network-a (reconstructed default)
# Router 2 is the shared bottleneck; routers 1 and 3 are cubic.
node 1 router power 3
node 2 router log1p
node 3 router power 3
node 4 source
node 5 source
node 6 destination
node 7 destination
link 1 6
link 2 6
link 2 7
link 3 2
link 4 1
link 4 2
link 5 2
link 5 3
regime light 4 -> 6
regime light 5 -> 7
regime medium 4 -> 6,7
regime medium 5 -> 7
regime heavy 4 -> 6,7
regime heavy 5 -> 6,7
)";

/// Bundled four-destination network. Each source owns a private cubic router
/// serving one destination (1 -> 7 for source 4, 3 -> 9 for source 5); the
/// shared log1p router 2 reaches all four destinations and carries every
/// other pair.
inline constexpr const char* kNetworkB = R"(# network-b (reconstructed default)
# Router 2 is the shared crossover; routers 1 and 3 are cubic.
node 1 router power 3
node 2 router log1p
node 3 router power 3
node 4 source
node 5 source
node 6 destination
node 7 destination
node 8 destination
node 9 destination
link 1 7
link 2 6
link 2 7
link 2 8
link 2 9
link 3 9
link 4 1
link 4 2
link 5 2
link 5 3
regime light 4 -> 7,8
regime light 5 -> 6,9
regime medium 4 -> 7,8,9
regime medium 5 -> 6,7,9
regime heavy 4 -> 6,7,8,9
regime heavy 5 -> 6,7,8,9
)";

/// Text of a bundled topology by label ("a" or "b").
inline const char* bundled_topology_text(std::string_view label) {
  if (label == "a") return kNetworkA;
  if (label == "b") return kNetworkB;
  throw ConfigError("unknown bundled network '" + std::string(label) + "'");
}

inline NetworkTopology bundled_topology(std::string_view label) {
  return parse_topology(bundled_topology_text(label));
}

}  // namespace coinroute::defaults
