#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "wfbench/graph.hpp"

using namespace wfbench;

namespace {

std::shared_ptr<const Instance> circle(int k, int m) {
  return std::make_shared<Instance>(MetricSpace::circle(m), k);
}

Configuration zeros(int k) { return Configuration(std::vector<int>(k, 0)); }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("k=1 m=2 graph by hand") {
  WorkFunctionGraph g = build_graph(circle(1, 2), zeros(1));
  REQUIRE(g.node_count() == 2);
  REQUIRE(g.edges().size() == 4);
  CHECK(g.start() == 0);

  CHECK(g.node(0)[0] == 0);
  CHECK(g.node(0)[1] == 1);
  CHECK(g.node(1)[0] == 1);
  CHECK(g.node(1)[1] == 0);

  CHECK(g.edges()[0] == WFEdge{0, 0, 0, 0, 0});
  CHECK(g.edges()[1] == WFEdge{0, 1, 1, 2, 1});
  CHECK(g.edges()[2] == WFEdge{1, 0, 0, 2, 1});
  CHECK(g.edges()[3] == WFEdge{1, 1, 1, 0, 0});
}

TEST_CASE("all-starts enumeration reproduces the shipped instance sizes") {
  BuildOptions opts;
  opts.all_starts = true;
  WorkFunctionGraph g36 = build_graph(circle(3, 6), zeros(3), opts);
  CHECK(g36.node_count() == 350);
  CHECK(g36.edges().size() == 2100);

  WorkFunctionGraph g46 = build_graph(circle(4, 6), zeros(4), opts);
  CHECK(g46.node_count() == 1001);
  CHECK(g46.edges().size() == 6006);

  // single-start closures are strictly smaller
  WorkFunctionGraph single = build_graph(circle(3, 6), zeros(3));
  CHECK(single.node_count() == 160);
  CHECK(single.edges().size() == 960);
}

TEST_CASE("closure, value bound and grad/dopt invariants") {
  WorkFunctionGraph g = build_graph(circle(2, 5), zeros(2));
  std::set<std::pair<std::uint32_t, std::uint16_t>> seen;
  for (const WFEdge& e : g.edges()) {
    CHECK(seen.emplace(e.u, e.r).second);
    CHECK(e.grad >= 0);
    CHECK(e.dopt >= 0);
    CHECK(e.grad >= e.dopt);
  }
  CHECK(seen.size() == g.node_count() * 5);
  for (std::uint32_t id = 0; id < g.node_count(); ++id) {
    std::int32_t min = g.node(id)[0];
    for (auto v : g.node(id)) {
      min = std::min(min, v);
      CHECK(v <= g.instance().max_config_dist());
    }
    CHECK(min == 0);
  }
}

TEST_CASE("single-start builds: only the start may lack an incoming edge") {
  WorkFunctionGraph g = build_graph(circle(2, 4), zeros(2));
  std::vector<char> has_incoming(g.node_count(), 0);
  for (const WFEdge& e : g.edges()) has_incoming[e.v] = 1;
  for (std::uint32_t id = 0; id < g.node_count(); ++id)
    if (id != g.start()) CHECK(has_incoming[id] == 1);
}

TEST_CASE("determinism across builds and worker counts") {
  auto inst = circle(3, 6);
  WorkFunctionGraph a = build_graph(inst, zeros(3));
  WorkFunctionGraph b = build_graph(inst, zeros(3));
  CHECK(a.edges() == b.edges());
  CHECK(a.checksum() == b.checksum());

  setenv("WFBENCH_THREADS", "3", 1);
  WorkFunctionGraph c = build_graph(inst, zeros(3));
  unsetenv("WFBENCH_THREADS");
  CHECK(a.edges() == c.edges());
  CHECK(a.checksum() == c.checksum());
}

TEST_CASE("self-loop exclusion drops exactly the loops") {
  auto inst = circle(2, 4);
  WorkFunctionGraph full = build_graph(inst, zeros(2));
  std::uint64_t loops = 0;
  for (const WFEdge& e : full.edges())
    if (e.u == e.v) ++loops;
  CHECK(loops > 0);

  BuildOptions opts;
  opts.self_loops = false;
  WorkFunctionGraph bare = build_graph(inst, zeros(2), opts);
  CHECK(bare.edges().size() == full.edges().size() - loops);
  for (const WFEdge& e : bare.edges()) CHECK(e.u != e.v);
  CHECK(bare.node_count() == full.node_count());
}

TEST_CASE("node cap aborts enumeration loudly") {
  BuildOptions opts;
  opts.node_cap = 10;
  try {
    build_graph(circle(3, 6), zeros(3), opts);
    FAIL("expected EnumerationOverflowError");
  } catch (const EnumerationOverflowError& e) {
    CHECK(e.cap == 10);
  }
}

TEST_CASE("edge weight formula") {
  CHECK(edge_weight_scaled(WFEdge{0, 0, 0, 3, 0}, Ratio(4)) == 3);
  CHECK(edge_weight_scaled(WFEdge{0, 0, 0, 5, 1}, Ratio(4)) == 0);
  CHECK(edge_weight_scaled(WFEdge{0, 0, 0, 0, 0}, Ratio(17)) == 0);
  // rational c scales by the denominator: c = 7/2 on grad=5, dopt=2 gives
  // 2*5 - 9*2 = -8 in half-units, i.e. 5 - 4.5*2 = -4
  CHECK(edge_weight_scaled(WFEdge{0, 0, 0, 5, 2}, Ratio(7, 2)) == -8);
}

TEST_CASE("symmetry canonicalization") {
  auto inst = circle(2, 4);
  WorkFunctionGraph g = build_graph(inst, zeros(2));

  // a rotation-invariant vector is its own canonical form
  std::vector<std::int32_t> flat(inst->config_count(), 3);
  CHECK(canonicalize_node(*inst, flat) == flat);

  for (std::uint32_t id = 0; id < g.node_count(); ++id) {
    const auto node = g.node(id);
    const auto canon = canonicalize_node(*inst, node);

    // every symmetry image canonicalizes to the same vector
    std::set<std::vector<std::int32_t>> orbit;
    for (int s = 0; s < inst->symmetry_count(); ++s) {
      const auto perm = inst->symmetry(s);
      std::vector<std::int32_t> image(node.size());
      for (std::uint32_t i = 0; i < node.size(); ++i) image[perm[i]] = node[i];
      orbit.insert(image);
      CHECK(canonicalize_node(*inst, image) == canon);
    }
    // orbit sizes divide the symmetry-group order
    CHECK(2 * 4 % orbit.size() == 0);
  }

  auto line = std::make_shared<Instance>(
      MetricSpace::from_matrix({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}, std::nullopt), 2);
  std::vector<std::int32_t> vec(line->config_count(), 0);
  CHECK_THROWS_AS(canonicalize_node(*line, vec), UnsupportedSymmetryError);
}

TEST_CASE("symmetry dedup shrinks the graph and keeps closure") {
  BuildOptions opts;
  opts.symmetry_dedup = true;
  WorkFunctionGraph g = build_graph(circle(3, 6), zeros(3), opts);
  WorkFunctionGraph full = build_graph(circle(3, 6), zeros(3));
  CHECK(g.node_count() < full.node_count());
  CHECK(g.edges().size() == g.node_count() * 6);
  CHECK(g.flags().symmetry_dedup);
}

TEST_CASE("graph file round trip") {
  WorkFunctionGraph g = build_graph(circle(2, 4), zeros(2));
  const auto path = temp_file("wfbench_roundtrip.wfg");
  save_graph(g, path);
  WorkFunctionGraph loaded = load_graph(path);

  CHECK(loaded.node_count() == g.node_count());
  CHECK(loaded.edges() == g.edges());
  CHECK(loaded.start() == g.start());
  CHECK(loaded.flags() == g.flags());
  CHECK(loaded.instance().k() == g.instance().k());
  CHECK(loaded.instance().m() == g.instance().m());
  for (std::uint32_t id = 0; id < g.node_count(); ++id) {
    const auto a = g.node(id);
    const auto b = loaded.node(id);
    CHECK(std::vector(a.begin(), a.end()) == std::vector(b.begin(), b.end()));
  }
  CHECK(loaded.checksum() == g.checksum());
  std::filesystem::remove(path);
}

TEST_CASE("explicit-metric graph file round trip") {
  auto inst = std::make_shared<Instance>(
      MetricSpace::from_matrix({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, std::nullopt), 2);
  WorkFunctionGraph g = build_graph(inst, zeros(2));
  const auto path = temp_file("wfbench_explicit.wfg");
  save_graph(g, path);
  WorkFunctionGraph loaded = load_graph(path);
  CHECK(loaded.instance().space().kind() == MetricKind::Explicit);
  CHECK(loaded.instance().space().dist(0, 2) == 1);
  CHECK(loaded.edges() == g.edges());
  std::filesystem::remove(path);
}

TEST_CASE("load errors are told apart") {
  WorkFunctionGraph g = build_graph(circle(1, 2), zeros(1));
  const auto path = temp_file("wfbench_damage.wfg");

  save_graph(g, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(60);
    char byte = 0x7F;
    f.write(&byte, 1);
  }
  CHECK_THROWS_AS(load_graph(path), ChecksumError);

  save_graph(g, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);  // format version field
    char v2[4] = {9, 0, 0, 0};
    f.write(v2, 4);
  }
  CHECK_THROWS_AS(load_graph(path), VersionError);

  save_graph(g, path);
  std::filesystem::resize_file(path, 20);
  CHECK_THROWS_AS(load_graph(path), TruncatedFileError);

  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << "HELLO WORLD THIS IS NOT A GRAPH";
  }
  CHECK_THROWS_AS(load_graph(path), FormatError);

  CHECK_THROWS_AS(load_graph(temp_file("wfbench_missing_file.wfg")), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("probabilistic visited set matches exact counts when sized generously") {
  WorkFunctionGraph exact = build_graph(circle(3, 6), zeros(3));
  BuildOptions opts;
  opts.probabilistic_visited = true;
  opts.bloom_bits = 1ull << 22;
  WorkFunctionGraph probabilistic = build_graph(circle(3, 6), zeros(3), opts);
  CHECK(probabilistic.flags().probabilistic_visited);
  CHECK(probabilistic.node_count() <= exact.node_count());
  CHECK(probabilistic.node_count() == exact.node_count());
  CHECK(probabilistic.unresolved_edges() == 0);
  CHECK(probabilistic.edges() == exact.edges());
}
