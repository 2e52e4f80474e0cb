#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "wfbench/metric.hpp"
#include "wfbench/ratio.hpp"
#include "wfbench/workfn.hpp"

namespace wfbench {

/// Edge target used when a probabilistic visited set dropped the successor
/// before it received an id. Never appears in exact builds.
inline constexpr std::uint32_t kUnresolvedNode = 0xFFFFFFFFu;

#pragma pack(push, 1)
struct WFEdge {
  std::uint32_t u;
  std::uint16_t r;
  std::uint32_t v;
  std::int32_t grad;
  std::int32_t dopt;

  bool operator==(const WFEdge&) const = default;
};
#pragma pack(pop)

struct BuildOptions {
  bool self_loops = true;
  bool symmetry_dedup = false;
  bool probabilistic_visited = false;
  /// Seed the frontier with the initial work function of every start
  /// configuration instead of just C0. This is what the shipped instance
  /// sizes correspond to; single-C0 closures are strictly smaller.
  bool all_starts = false;
  std::uint64_t bloom_bits = 1ull << 26;
  int bloom_hashes = 4;
  std::uint64_t node_cap = 100'000'000;
};

struct GraphFlags {
  bool self_loops = true;
  bool symmetry_dedup = false;
  bool probabilistic_visited = false;
  bool all_starts = false;

  std::uint32_t pack() const;
  static GraphFlags unpack(std::uint32_t bits);
  bool operator==(const GraphFlags&) const = default;
};

/// All reachable normalized work functions of an instance and the one edge
/// per (node, request). Node vectors live in a flat pool; ids are BFS
/// discovery order, so two builds of the same instance are identical.
class WorkFunctionGraph {
 public:
  WorkFunctionGraph(std::shared_ptr<const Instance> instance, GraphFlags flags)
      : instance_(std::move(instance)), flags_(flags) {}

  const Instance& instance() const { return *instance_; }
  const std::shared_ptr<const Instance>& instance_ptr() const { return instance_; }
  GraphFlags flags() const { return flags_; }
  std::uint32_t start() const { return start_; }

  std::uint32_t node_count() const { return node_count_; }
  std::span<const std::int32_t> node(std::uint32_t id) const {
    const std::size_t w = instance_->config_count();
    return {node_pool_.data() + static_cast<std::size_t>(id) * w, w};
  }
  WorkFunction node_work_function(std::uint32_t id) const;

  const std::vector<WFEdge>& edges() const { return edges_; }

  /// When the probabilistic visited set was used: edges whose successor id
  /// could not be resolved (counts are lower bounds in that mode).
  std::uint64_t unresolved_edges() const { return unresolved_edges_; }

  /// Checksum of the serialized form; matches the one written by save_graph.
  std::uint64_t checksum() const;

  // Builder access.
  std::uint32_t add_node_raw(std::span<const std::int32_t> values);
  void add_edge(WFEdge e);
  void set_start(std::uint32_t id) { start_ = id; }
  void note_unresolved() { ++unresolved_edges_; }

 private:
  std::shared_ptr<const Instance> instance_;
  GraphFlags flags_;
  std::uint32_t start_ = 0;
  std::uint32_t node_count_ = 0;
  std::vector<std::int32_t> node_pool_;
  std::vector<WFEdge> edges_;
  std::uint64_t unresolved_edges_ = 0;
};

/// Breadth-first closure from normalize(w_0) under all m requests.
/// Deterministic: FIFO frontier, requests scanned 0..m-1.
WorkFunctionGraph build_graph(std::shared_ptr<const Instance> instance,
                              const Configuration& c0, const BuildOptions& options = {});

/// weight_c of an edge, scaled by c.den so the value stays integral:
/// den*grad - (num+den)*dopt. For integer c this is grad - (c+1)*dopt.
inline std::int64_t edge_weight_scaled(const WFEdge& e, Ratio c) {
  return c.den * static_cast<std::int64_t>(e.grad) -
         (c.num + c.den) * static_cast<std::int64_t>(e.dopt);
}

/// Lexicographically least image of a normalized node vector under the 2m
/// circle symmetries. Throws UnsupportedSymmetryError off the circle.
std::vector<std::int32_t> canonicalize_node(const Instance& instance,
                                            std::span<const std::int32_t> wf);

void save_graph(const WorkFunctionGraph& graph, const std::filesystem::path& path);
WorkFunctionGraph load_graph(const std::filesystem::path& path);

}  // namespace wfbench
