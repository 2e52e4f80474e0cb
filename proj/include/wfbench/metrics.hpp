#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wfbench/feasibility.hpp"
#include "wfbench/graph.hpp"
#include "wfbench/potential.hpp"
#include "wfbench/ratio.hpp"

namespace wfbench {

/// Tolerance on constraint shortfalls for real-valued (external) potentials;
/// integer potentials compare exactly.
inline constexpr double kRealTolerance = 1e-9;

struct NodeValues {
  std::vector<double> values;  // exactly integral when integer_valued
  bool integer_valued = true;
};

/// Shortfall of the normalized inequality on one edge given its endpoint
/// values; positive means violated. Integer-valued potentials go through
/// exact scaled arithmetic.
inline double edge_shortfall(const WFEdge& e, double vu, double vv, bool integer_valued,
                             Ratio c) {
  if (integer_valued) {
    const std::int64_t scaled =
        c.den * static_cast<std::int64_t>(e.grad) -
        (c.num + c.den) * static_cast<std::int64_t>(e.dopt) -
        c.den * (std::llround(vv) - std::llround(vu));
    return static_cast<double>(scaled) / static_cast<double>(c.den);
  }
  return static_cast<double>(e.grad) -
         static_cast<double>(c.num + c.den) / static_cast<double>(c.den) *
             static_cast<double>(e.dopt) -
         (vv - vu);
}

inline bool edge_violated(const WFEdge& e, double vu, double vv, bool integer_valued,
                          Ratio c) {
  return edge_shortfall(e, vu, vv, integer_valued, c) >
         (integer_valued ? 0.0 : kRealTolerance);
}

/// Potential value per node, each node evaluated once. Evaluation errors are
/// rethrown with the offending node id attached.
NodeValues node_values(const WorkFunctionGraph& graph, const Potential& potential);

struct ViolationStats {
  std::uint64_t count = 0;
  double l1 = 0;
  double l2 = 0;
  double linf = 0;
};

/// Edges failing values[v] - values[u] + (c+1)*dopt >= grad, with shortfall
/// norms over the violated set.
ViolationStats violations_k(const WorkFunctionGraph& graph, const NodeValues& values,
                            Ratio c);

/// Violations restricted to dopt = 0 edges (no ratio term).
std::uint64_t violations_dmin_0(const WorkFunctionGraph& graph, const NodeValues& values);

/// Fraction of hard edges (dopt = 0, grad > 0) where the potential moves;
/// nullopt when the graph has no hard edges.
std::optional<double> detected_dmin_0_score(const WorkFunctionGraph& graph,
                                            const NodeValues& values);

/// Violations of Phi(w_v + dopt*1) - Phi(w_u) >= grad; uses the exact shift
/// slope when the potential has one, re-evaluates otherwise.
std::uint64_t violations_renorm(const WorkFunctionGraph& graph, const Potential& potential,
                                const NodeValues& values);

/// Smallest rho making every dopt > 0 edge satisfied; nullopt when no such
/// edge exists ("no constraining edges").
std::optional<double> strong_hypothesis_rho(const WorkFunctionGraph& graph,
                                            const NodeValues& values);

struct SlopeProbe {
  double slope = 0;
  bool nonlinear = false;
};

/// Growth rate of the potential under constant shifts, probed at the start
/// node with shifts 1 and 16.
SlopeProbe opt_upper_bound(const WorkFunctionGraph& graph, const Potential& potential);

struct BellmanStats {
  std::optional<double> node_r2, node_corr, edge_r2, edge_corr;
};

/// Node- and edge-level agreement between the candidate values and the
/// Bellman potential; undefined entries when either side is constant.
BellmanStats bellman_correlations(const WorkFunctionGraph& graph, const NodeValues& values,
                                  const BellmanCertificate& cert);

struct EvaluationReport {
  Ratio c;
  std::uint64_t edges_total = 0;
  std::uint64_t violations_k = 0;
  double violations_k_l1 = 0;
  double violations_k_l2 = 0;
  double violations_k_linf = 0;
  std::uint64_t violations_dmin_0 = 0;
  std::optional<double> detected_dmin_0_score;
  std::uint64_t violations_renorm = 0;
  std::optional<double> strong_hypothesis_rho;
  double opt_upper_bound = 0;
  bool opt_upper_bound_nonlinear = false;
  std::optional<double> bellman_node_r2, bellman_node_corr;
  std::optional<double> bellman_edge_r2, bellman_edge_corr;
  double score = 1.0;
  // violated edges bucketed by the sign of their weight_c
  std::uint64_t violations_weight_pos = 0;
  std::uint64_t violations_weight_zero = 0;
  std::uint64_t violations_weight_neg = 0;
  std::vector<std::string> flags;
};

/// Advisory flags from the report's competitiveness metrics.
std::vector<std::string> interpret(const EvaluationReport& report);

/// Runs the whole diagnostic suite. Bellman statistics are filled only when
/// cert is non-null and feasible at the same c.
EvaluationReport evaluate_report(const WorkFunctionGraph& graph, const Potential& potential,
                                 const NodeValues& values, Ratio c,
                                 const BellmanCertificate* cert = nullptr);

std::string report_to_json(const EvaluationReport& report, const WorkFunctionGraph& graph);

/// Per-edge shortfall rows for external plotting:
/// edge_id,u,r,v,grad,dopt,weight_c,shortfall.
void write_shortfall_csv(const WorkFunctionGraph& graph, const NodeValues& values, Ratio c,
                         std::ostream& out);

}  // namespace wfbench
