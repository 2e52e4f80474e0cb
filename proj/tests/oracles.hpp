#pragma once

// Independent brute-force oracles for the test suites. These deliberately
// avoid the library's precomputed tables and optimized paths: everything is
// recomputed from definitions so frozen expected values have an independent
// source.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "wfbench/graph.hpp"
#include "wfbench/metric.hpp"
#include "wfbench/potential.hpp"
#include "wfbench/workfn.hpp"

namespace oracle {

// Minimum-cost assignment by recursive search over all bijections.
inline std::int64_t matching_cost(const wfbench::MetricSpace& space,
                                  const std::vector<int>& xs, std::vector<int> ys,
                                  std::vector<bool>& used, std::size_t depth) {
  if (depth == xs.size()) return 0;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (used[j]) continue;
    used[j] = true;
    const std::int64_t rest = matching_cost(space, xs, ys, used, depth + 1);
    used[j] = false;
    best = std::min(best, space.dist(xs[depth], ys[j]) + rest);
  }
  return best;
}

inline std::int64_t matching_distance(const wfbench::MetricSpace& space,
                                      const wfbench::Configuration& x,
                                      const wfbench::Configuration& y) {
  std::vector<bool> used(y.points().size(), false);
  return matching_cost(space, x.points(), y.points(), used, 0);
}

// T_r(w)(X) = min over Y containing r of w(Y) + d(X, Y), straight from the
// definition via the indexer only.
inline std::vector<std::int64_t> update(const wfbench::Instance& inst,
                                        const std::vector<std::int64_t>& w, int r) {
  const auto& indexer = inst.indexer();
  std::vector<std::int64_t> out(indexer.count(), std::numeric_limits<std::int64_t>::max());
  for (std::uint32_t x = 0; x < indexer.count(); ++x) {
    const wfbench::Configuration cx = indexer.to_config(x);
    for (std::uint32_t y = 0; y < indexer.count(); ++y) {
      const wfbench::Configuration cy = indexer.to_config(y);
      if (!cy.contains(r)) continue;
      out[x] = std::min(out[x], w[y] + oracle::matching_distance(inst.space(), cx, cy));
    }
  }
  return out;
}

inline std::int64_t extended_cost(const wfbench::Instance& inst,
                                  const std::vector<std::int64_t>& w, int r) {
  const auto next = update(inst, w, r);
  std::int64_t grad = std::numeric_limits<std::int64_t>::min();
  for (std::size_t i = 0; i < w.size(); ++i) grad = std::max(grad, next[i] - w[i]);
  return grad;
}

inline std::int64_t opt_increase(const wfbench::Instance& inst,
                                 const std::vector<std::int64_t>& w, int r) {
  const auto next = update(inst, w, r);
  return *std::min_element(next.begin(), next.end()) -
         *std::min_element(w.begin(), w.end());
}

// Canonical potential straight from its nested-minimization definition.
inline std::int64_t canonical_value(const wfbench::Instance& inst,
                                    const wfbench::CanonicalSpec& spec,
                                    std::span<const std::int32_t> wf) {
  const int m = inst.m();
  const int n = spec.n;
  std::vector<int> points(n, 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (;;) {
    std::int64_t total = 0;
    for (const auto& row : spec.index_matrix) {
      std::vector<int> cfg;
      cfg.reserve(row.size());
      for (int e : row)
        cfg.push_back(e > 0 ? points[e - 1] : inst.space().antipode(points[-e - 1]));
      total += wf[inst.indexer().to_index(wfbench::Configuration(cfg))];
    }
    int slot = 0;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j, ++slot)
        total -= spec.coefs[slot] * inst.space().dist(points[i - 1], points[j - 1]);
    best = std::min(best, total);

    int d = n - 1;
    while (d >= 0 && points[d] == m - 1) points[d--] = 0;
    if (d < 0) break;
    ++points[d];
  }
  return best;
}

// Direct single-pass violation scan given integer node values.
inline std::uint64_t violation_count(const wfbench::WorkFunctionGraph& graph,
                                     const std::vector<std::int64_t>& values,
                                     std::int64_t c) {
  std::uint64_t count = 0;
  for (const auto& e : graph.edges()) {
    if (e.v == wfbench::kUnresolvedNode) continue;
    if (values[e.v] - values[e.u] + (c + 1) * static_cast<std::int64_t>(e.dopt) <
        static_cast<std::int64_t>(e.grad))
      ++count;
  }
  return count;
}

}  // namespace oracle
