#include "wfbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include <json.hpp>

#include "wfbench/parallel.hpp"

namespace wfbench {

namespace {

std::int64_t as_int(double v) { return std::llround(v); }

inline bool is_violated(double shortfall, bool integer_valued) {
  return integer_valued ? shortfall > 0 : shortfall > kRealTolerance;
}

struct EdgeScan {
  ViolationStats stats;
  double l2sq = 0;
  std::uint64_t dmin0_violations = 0;
  std::uint64_t hard_edges = 0;
  std::uint64_t hard_detected = 0;
  std::uint64_t weight_pos = 0, weight_zero = 0, weight_neg = 0;
  double rho_max = -std::numeric_limits<double>::infinity();
  bool rho_defined = false;

  void merge(const EdgeScan& o) {
    stats.count += o.stats.count;
    stats.l1 += o.stats.l1;
    l2sq += o.l2sq;
    stats.linf = std::max(stats.linf, o.stats.linf);
    dmin0_violations += o.dmin0_violations;
    hard_edges += o.hard_edges;
    hard_detected += o.hard_detected;
    weight_pos += o.weight_pos;
    weight_zero += o.weight_zero;
    weight_neg += o.weight_neg;
    rho_max = std::max(rho_max, o.rho_max);
    rho_defined = rho_defined || o.rho_defined;
  }
};

EdgeScan scan_edges(const WorkFunctionGraph& graph, const NodeValues& vals, Ratio c) {
  const auto& edges = graph.edges();
  std::vector<EdgeScan> partial(chunk_count(edges.size()));
  parallel_chunks(edges.size(), [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    EdgeScan s;
    for (std::size_t i = begin; i < end; ++i) {
      const WFEdge& e = edges[i];
      if (e.v == kUnresolvedNode) continue;
      const double diff = vals.values[e.v] - vals.values[e.u];
      const double shortfall =
          edge_shortfall(e, vals.values[e.u], vals.values[e.v], vals.integer_valued, c);
      if (is_violated(shortfall, vals.integer_valued)) {
        ++s.stats.count;
        s.stats.l1 += shortfall;
        s.l2sq += shortfall * shortfall;
        s.stats.linf = std::max(s.stats.linf, shortfall);
        if (e.dopt == 0) ++s.dmin0_violations;
        const std::int64_t w = edge_weight_scaled(e, c);
        if (w > 0)
          ++s.weight_pos;
        else if (w == 0)
          ++s.weight_zero;
        else
          ++s.weight_neg;
      }
      if (e.dopt == 0 && e.grad > 0) {
        ++s.hard_edges;
        const bool moved = vals.integer_valued
                               ? as_int(vals.values[e.v]) != as_int(vals.values[e.u])
                               : std::abs(diff) > kRealTolerance;
        if (moved) ++s.hard_detected;
      }
      if (e.dopt > 0) {
        s.rho_defined = true;
        s.rho_max = std::max(
            s.rho_max, (static_cast<double>(e.grad) - diff) / static_cast<double>(e.dopt) - 1.0);
      }
    }
    partial[chunk] = s;
  });
  EdgeScan total;
  for (const auto& p : partial) total.merge(p);
  total.stats.l2 = std::sqrt(total.l2sq);
  return total;
}

}  // namespace

NodeValues node_values(const WorkFunctionGraph& graph, const Potential& potential) {
  NodeValues out;
  out.integer_valued = potential.integer_valued();
  out.values.resize(graph.node_count());
  const bool serial = !out.integer_valued;  // external bridges serialize calls anyway
  auto eval_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t id = begin; id < end; ++id) {
      try {
        out.values[id] = potential.value(graph.node(static_cast<std::uint32_t>(id)));
      } catch (const ExternalProcessError& e) {
        throw ExternalProcessError(std::string(e.what()) + " (node " + std::to_string(id) + ")",
                                   static_cast<std::int64_t>(id));
      } catch (const ExternalTimeoutError& e) {
        throw ExternalTimeoutError(std::string(e.what()) + " (node " + std::to_string(id) + ")",
                                   static_cast<std::int64_t>(id));
      } catch (const ExternalProtocolError& e) {
        throw ExternalProtocolError(std::string(e.what()) + " (node " + std::to_string(id) + ")",
                                    static_cast<std::int64_t>(id));
      }
    }
  };
  if (serial)
    eval_range(0, graph.node_count());
  else
    parallel_chunks(graph.node_count(),
                    [&](std::size_t, std::size_t b, std::size_t e) { eval_range(b, e); });
  return out;
}

ViolationStats violations_k(const WorkFunctionGraph& graph, const NodeValues& values,
                            Ratio c) {
  return scan_edges(graph, values, c).stats;
}

std::uint64_t violations_dmin_0(const WorkFunctionGraph& graph, const NodeValues& values) {
  std::uint64_t count = 0;
  for (const WFEdge& e : graph.edges()) {
    if (e.v == kUnresolvedNode || e.dopt != 0) continue;
    if (values.integer_valued) {
      if (as_int(values.values[e.v]) - as_int(values.values[e.u]) < e.grad) ++count;
    } else {
      if (values.values[e.v] - values.values[e.u] < e.grad - kRealTolerance) ++count;
    }
  }
  return count;
}

std::optional<double> detected_dmin_0_score(const WorkFunctionGraph& graph,
                                            const NodeValues& values) {
  std::uint64_t hard = 0, detected = 0;
  for (const WFEdge& e : graph.edges()) {
    if (e.v == kUnresolvedNode || !(e.dopt == 0 && e.grad > 0)) continue;
    ++hard;
    const bool moved = values.integer_valued
                           ? as_int(values.values[e.v]) != as_int(values.values[e.u])
                           : std::abs(values.values[e.v] - values.values[e.u]) > kRealTolerance;
    if (moved) ++detected;
  }
  if (hard == 0) return std::nullopt;
  return static_cast<double>(detected) / static_cast<double>(hard);
}

std::uint64_t violations_renorm(const WorkFunctionGraph& graph, const Potential& potential,
                                const NodeValues& values) {
  const auto slope = potential.shift_slope();
  std::uint64_t count = 0;
  std::map<std::pair<std::uint32_t, std::int32_t>, double> shifted_cache;
  for (const WFEdge& e : graph.edges()) {
    if (e.v == kUnresolvedNode) continue;
    double shifted_v;
    if (slope) {
      shifted_v = values.values[e.v] +
                  static_cast<double>(*slope) * static_cast<double>(e.dopt);
    } else {
      auto key = std::make_pair(e.v, e.dopt);
      auto it = shifted_cache.find(key);
      if (it == shifted_cache.end())
        it = shifted_cache.emplace(key, potential.value_shifted(graph.node(e.v), e.dopt)).first;
      shifted_v = it->second;
    }
    if (values.integer_valued) {
      if (as_int(shifted_v) - as_int(values.values[e.u]) < e.grad) ++count;
    } else {
      if (shifted_v - values.values[e.u] < e.grad - kRealTolerance) ++count;
    }
  }
  return count;
}

std::optional<double> strong_hypothesis_rho(const WorkFunctionGraph& graph,
                                            const NodeValues& values) {
  bool defined = false;
  double rho = -std::numeric_limits<double>::infinity();
  for (const WFEdge& e : graph.edges()) {
    if (e.v == kUnresolvedNode || e.dopt <= 0) continue;
    defined = true;
    const double diff = values.values[e.v] - values.values[e.u];
    rho = std::max(rho, (static_cast<double>(e.grad) - diff) / static_cast<double>(e.dopt) - 1.0);
  }
  if (!defined) return std::nullopt;
  return rho;
}

SlopeProbe opt_upper_bound(const WorkFunctionGraph& graph, const Potential& potential) {
  const auto start = graph.node(graph.start());
  const double base = potential.value(start);
  std::vector<std::int32_t> shifted(start.begin(), start.end());
  for (auto& v : shifted) v += 1;
  const double slope1 = potential.value(shifted) - base;
  for (auto& v : shifted) v += 15;
  const double slope16 = (potential.value(shifted) - base) / 16.0;
  SlopeProbe probe;
  probe.slope = slope16;
  probe.nonlinear = std::abs(slope1 - slope16) > 1e-9;
  return probe;
}

namespace {

struct Moments {
  double mean_x = 0, mean_y = 0, var_x = 0, var_y = 0, cov = 0;
  std::size_t n = 0;
};

template <typename GetXY>
Moments moments(std::size_t n, GetXY&& get) {
  Moments m;
  m.n = n;
  if (n == 0) return m;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto [x, y] = get(i);
    sx += x;
    sy += y;
  }
  m.mean_x = sx / n;
  m.mean_y = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    auto [x, y] = get(i);
    m.var_x += (x - m.mean_x) * (x - m.mean_x);
    m.var_y += (y - m.mean_y) * (y - m.mean_y);
    m.cov += (x - m.mean_x) * (y - m.mean_y);
  }
  return m;
}

std::optional<double> pearson(const Moments& m) {
  if (m.n < 2 || m.var_x <= 0 || m.var_y <= 0) return std::nullopt;
  return m.cov / std::sqrt(m.var_x * m.var_y);
}

}  // namespace

BellmanStats bellman_correlations(const WorkFunctionGraph& graph, const NodeValues& values,
                                  const BellmanCertificate& cert) {
  if (!cert.feasible) throw ValidationError("bellman_correlations needs a feasible certificate");
  BellmanStats out;
  const double den = static_cast<double>(cert.c.den);

  const Moments node_m =
      moments(graph.node_count(), [&](std::size_t i) -> std::pair<double, double> {
        return {values.values[i], static_cast<double>(cert.psi[i]) / den};
      });
  if (auto r = pearson(node_m)) {
    out.node_corr = *r;
    out.node_r2 = (*r) * (*r);
  }

  std::vector<std::uint32_t> resolved;
  resolved.reserve(graph.edges().size());
  for (std::uint32_t i = 0; i < graph.edges().size(); ++i)
    if (graph.edges()[i].v != kUnresolvedNode) resolved.push_back(i);
  const Moments edge_m = moments(resolved.size(), [&](std::size_t i) -> std::pair<double, double> {
    const WFEdge& e = graph.edges()[resolved[i]];
    return {values.values[e.v] - values.values[e.u],
            static_cast<double>(cert.psi[e.v] - cert.psi[e.u]) / den};
  });
  if (auto r = pearson(edge_m)) {
    out.edge_corr = *r;
    out.edge_r2 = (*r) * (*r);
  }
  return out;
}

std::vector<std::string> interpret(const EvaluationReport& report) {
  std::vector<std::string> flags;
  const double target = report.c.to_double() + 1.0;
  if (report.opt_upper_bound < target - 1e-12) flags.push_back("ratio-infeasible-form");
  if (report.strong_hypothesis_rho) {
    const double rho = *report.strong_hypothesis_rho;
    if (rho < report.opt_upper_bound - 1e-12 && report.violations_dmin_0 == 0)
      flags.push_back("ratio-reducible");
    if (rho > report.opt_upper_bound + 1e-12) flags.push_back("ratio-must-increase");
  }
  return flags;
}

EvaluationReport evaluate_report(const WorkFunctionGraph& graph, const Potential& potential,
                                 const NodeValues& values, Ratio c,
                                 const BellmanCertificate* cert) {
  EvaluationReport rep;
  rep.c = c;
  rep.edges_total = graph.edges().size();

  const EdgeScan scan = scan_edges(graph, values, c);
  rep.violations_k = scan.stats.count;
  rep.violations_k_l1 = scan.stats.l1;
  rep.violations_k_l2 = scan.stats.l2;
  rep.violations_k_linf = scan.stats.linf;
  rep.violations_dmin_0 = scan.dmin0_violations;
  if (scan.hard_edges > 0)
    rep.detected_dmin_0_score =
        static_cast<double>(scan.hard_detected) / static_cast<double>(scan.hard_edges);
  rep.violations_weight_pos = scan.weight_pos;
  rep.violations_weight_zero = scan.weight_zero;
  rep.violations_weight_neg = scan.weight_neg;
  if (scan.rho_defined) rep.strong_hypothesis_rho = scan.rho_max;

  rep.violations_renorm = violations_renorm(graph, potential, values);

  const SlopeProbe probe = opt_upper_bound(graph, potential);
  rep.opt_upper_bound = probe.slope;
  rep.opt_upper_bound_nonlinear = probe.nonlinear;

  if (cert && cert->feasible && cert->c == c) {
    const BellmanStats bs = bellman_correlations(graph, values, *cert);
    rep.bellman_node_r2 = bs.node_r2;
    rep.bellman_node_corr = bs.node_corr;
    rep.bellman_edge_r2 = bs.edge_r2;
    rep.bellman_edge_corr = bs.edge_corr;
  }

  rep.score = rep.edges_total == 0
                  ? 1.0
                  : 1.0 - static_cast<double>(rep.violations_k) /
                              static_cast<double>(rep.edges_total);
  rep.flags = interpret(rep);
  return rep;
}

namespace {

nlohmann::json opt_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

std::string report_to_json(const EvaluationReport& report, const WorkFunctionGraph& graph) {
  nlohmann::json j;
  j["c"] = report.c.to_string();
  j["instance"] = {{"k", graph.instance().k()},
                   {"m", graph.instance().m()},
                   {"self_loops", graph.flags().self_loops},
                   {"symmetry_dedup", graph.flags().symmetry_dedup},
                   {"probabilistic_visited", graph.flags().probabilistic_visited},
                   {"graph_checksum", graph.checksum()}};
  j["edges_total"] = report.edges_total;
  j["violations_k"] = report.violations_k;
  j["violations_k_l1"] = report.violations_k_l1;
  j["violations_k_l2"] = report.violations_k_l2;
  j["violations_k_linf"] = report.violations_k_linf;
  j["violations_dmin_0"] = report.violations_dmin_0;
  j["detected_dmin_0_score"] = opt_to_json(report.detected_dmin_0_score);
  j["violations_renorm"] = report.violations_renorm;
  j["strong_hypothesis_rho"] = opt_to_json(report.strong_hypothesis_rho);
  j["opt_upper_bound"] = report.opt_upper_bound;
  j["opt_upper_bound_nonlinear"] = report.opt_upper_bound_nonlinear;
  j["bellman_node_r2"] = opt_to_json(report.bellman_node_r2);
  j["bellman_node_corr"] = opt_to_json(report.bellman_node_corr);
  j["bellman_edge_r2"] = opt_to_json(report.bellman_edge_r2);
  j["bellman_edge_corr"] = opt_to_json(report.bellman_edge_corr);
  j["score"] = report.score;
  j["violations_by_weight_sign"] = {{"positive", report.violations_weight_pos},
                                    {"zero", report.violations_weight_zero},
                                    {"negative", report.violations_weight_neg}};
  j["flags"] = report.flags;
  return j.dump(2);
}

void write_shortfall_csv(const WorkFunctionGraph& graph, const NodeValues& values, Ratio c,
                         std::ostream& out) {
  out << "edge_id,u,r,v,grad,dopt,weight_c,shortfall\n";
  for (std::size_t i = 0; i < graph.edges().size(); ++i) {
    const WFEdge& e = graph.edges()[i];
    if (e.v == kUnresolvedNode) continue;
    const double w = static_cast<double>(edge_weight_scaled(e, c)) / static_cast<double>(c.den);
    out << i << ',' << e.u << ',' << e.r << ',' << e.v << ',' << e.grad << ',' << e.dopt << ','
        << w << ','
        << edge_shortfall(e, values.values[e.u], values.values[e.v], values.integer_valued, c)
        << '\n';
  }
}

}  // namespace wfbench
