#pragma once

#include <cstdint>
#include <vector>

#include "wfbench/graph.hpp"
#include "wfbench/ratio.hpp"

namespace wfbench {

/// Outcome of the difference-constraint solve at ratio c: either a node
/// potential satisfying every edge inequality, or an explicit negative
/// cycle showing none exists.
struct BellmanCertificate {
  Ratio c;
  bool feasible = false;
  /// Per-node potential in 1/c.den units (so plain integers for integer c);
  /// present iff feasible.
  std::vector<std::int64_t> psi;
  /// Edge ids (indices into graph.edges()) of a cycle whose weights sum to a
  /// strictly positive required increase; present iff infeasible.
  std::vector<std::uint32_t> cycle;
};

/// Queue-based relaxation over edge lengths (c+1)*dopt - grad from a virtual
/// super-source. Always returns either a verified-satisfiable potential or a
/// negative cycle.
BellmanCertificate certify(const WorkFunctionGraph& graph, Ratio c);

/// Counts edges whose constraint psi(v) - psi(u) >= weight_c fails; 0 for
/// every certificate certify() emits.
std::uint64_t verify_certificate(const WorkFunctionGraph& graph,
                                 const BellmanCertificate& cert);

}  // namespace wfbench
