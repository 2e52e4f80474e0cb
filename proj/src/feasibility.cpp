#include "wfbench/feasibility.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "wfbench/parallel.hpp"

namespace wfbench {

namespace {

constexpr std::uint32_t kNoParent = 0xFFFFFFFFu;

struct Csr {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> edge_ids;
};

Csr adjacency(const WorkFunctionGraph& graph) {
  const std::uint32_t n = graph.node_count();
  Csr csr;
  csr.offsets.assign(n + 1, 0);
  for (const WFEdge& e : graph.edges())
    if (e.v != kUnresolvedNode) ++csr.offsets[e.u + 1];
  for (std::uint32_t i = 0; i < n; ++i) csr.offsets[i + 1] += csr.offsets[i];
  csr.edge_ids.resize(csr.offsets.back());
  std::vector<std::uint32_t> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
  for (std::uint32_t eid = 0; eid < graph.edges().size(); ++eid) {
    const WFEdge& e = graph.edges()[eid];
    if (e.v == kUnresolvedNode) continue;
    csr.edge_ids[cursor[e.u]++] = eid;
  }
  return csr;
}

}  // namespace

BellmanCertificate certify(const WorkFunctionGraph& graph, Ratio c) {
  if (c.num < c.den) throw ValidationError("certify needs c >= 1");
  const std::uint32_t n = graph.node_count();
  const Csr csr = adjacency(graph);
  const auto& edges = graph.edges();

  BellmanCertificate cert;
  cert.c = c;

  // Virtual super-source: every node starts at distance 0 and in the queue.
  std::vector<std::int64_t> dist(n, 0);
  std::vector<std::uint32_t> parent_edge(n, kNoParent);
  std::vector<std::uint32_t> relax_count(n, 0);
  std::vector<char> in_queue(n, 1);
  std::deque<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < n; ++i) queue.push_back(i);

  while (!queue.empty()) {
    const std::uint32_t u = queue.front();
    queue.pop_front();
    in_queue[u] = 0;
    for (std::uint32_t slot = csr.offsets[u]; slot < csr.offsets[u + 1]; ++slot) {
      const std::uint32_t eid = csr.edge_ids[slot];
      const WFEdge& e = edges[eid];
      const std::int64_t len = -edge_weight_scaled(e, c);  // (c+1)*dopt - grad, scaled
      if (dist[u] + len < dist[e.v]) {
        dist[e.v] = dist[u] + len;
        parent_edge[e.v] = eid;
        if (++relax_count[e.v] >= n) {
          // Walk back n steps to land inside the cycle, then collect it.
          std::uint32_t x = e.v;
          for (std::uint32_t i = 0; i < n; ++i) x = edges[parent_edge[x]].u;
          const std::uint32_t anchor = x;
          std::uint32_t cur = anchor;
          do {
            const std::uint32_t pe = parent_edge[cur];
            cert.cycle.push_back(pe);
            cur = edges[pe].u;
          } while (cur != anchor);
          std::reverse(cert.cycle.begin(), cert.cycle.end());
          cert.feasible = false;
          return cert;
        }
        if (!in_queue[e.v]) {
          in_queue[e.v] = 1;
          queue.push_back(e.v);
        }
      }
    }
  }

  cert.feasible = true;
  cert.psi.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) cert.psi[i] = -dist[i];
  return cert;
}

std::uint64_t verify_certificate(const WorkFunctionGraph& graph,
                                 const BellmanCertificate& cert) {
  if (!cert.feasible) throw ValidationError("verify_certificate needs a feasible certificate");
  const auto& edges = graph.edges();
  std::vector<std::uint64_t> partial(chunk_count(edges.size()), 0);
  parallel_chunks(edges.size(), [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::uint64_t bad = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const WFEdge& e = edges[i];
      if (e.v == kUnresolvedNode) continue;
      if (cert.psi[e.v] - cert.psi[e.u] < edge_weight_scaled(e, cert.c)) ++bad;
    }
    partial[chunk] = bad;
  });
  std::uint64_t total = 0;
  for (std::uint64_t p : partial) total += p;
  return total;
}

}  // namespace wfbench
