#include "wfbench/graph.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "wfbench/parallel.hpp"

namespace wfbench {

namespace {

constexpr char kMagic[4] = {'W', 'F', 'G', '1'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t vec_hash(std::span<const std::int32_t> v) {
  return fnv1a64(v.data(), v.size() * sizeof(std::int32_t), kFnvOffset);
}

class BloomFilter {
 public:
  BloomFilter(std::uint64_t bits, int hashes)
      : bits_(std::max<std::uint64_t>(bits, 64)), hashes_(std::max(hashes, 1)),
        words_((bits_ + 63) / 64, 0) {}

  // Returns true if the element was possibly seen before; inserts it.
  bool test_and_set(std::uint64_t h1) {
    const std::uint64_t h2 = splitmix64(h1) | 1;
    bool seen = true;
    for (int i = 0; i < hashes_; ++i) {
      const std::uint64_t bit = (h1 + static_cast<std::uint64_t>(i) * h2) % bits_;
      std::uint64_t& word = words_[bit >> 6];
      const std::uint64_t mask = 1ull << (bit & 63);
      if (!(word & mask)) {
        seen = false;
        word |= mask;
      }
    }
    return seen;
  }

 private:
  std::uint64_t bits_;
  int hashes_;
  std::vector<std::uint64_t> words_;
};

struct Successor {
  std::vector<std::int32_t> vec;  // normalized (and canonicalized in symmetry mode)
  std::int32_t grad = 0;
  std::int32_t dopt = 0;
};

// Request operator on a normalized node vector; grad/dopt are shift
// invariant, so computing them here equals computing before normalization.
Successor successor_of(const Instance& inst, std::span<const std::int32_t> w, int r,
                       bool symmetry) {
  const std::uint32_t n = inst.config_count();
  Successor out;
  out.vec.assign(n, std::numeric_limits<std::int32_t>::max());
  for (std::uint32_t y : inst.configs_containing(r)) {
    const std::int32_t wy = w[y];
    const std::int32_t* drow = inst.config_dist_row(y).data();
    for (std::uint32_t x = 0; x < n; ++x) {
      const std::int32_t cand = wy + drow[x];
      if (cand < out.vec[x]) out.vec[x] = cand;
    }
  }
  std::int32_t grad = 0;
  std::int32_t new_min = std::numeric_limits<std::int32_t>::max();
  for (std::uint32_t x = 0; x < n; ++x) {
    grad = std::max(grad, out.vec[x] - w[x]);
    new_min = std::min(new_min, out.vec[x]);
  }
  out.grad = grad;
  out.dopt = new_min;  // source is normalized, so min w = 0
  if (new_min != 0)
    for (auto& v : out.vec) v -= new_min;
  if (symmetry) out.vec = canonicalize_node(inst, out.vec);
  return out;
}

struct VectorKeyHash {
  std::size_t operator()(const std::vector<std::int32_t>& v) const {
    return static_cast<std::size_t>(vec_hash(v));
  }
};

}  // namespace

std::uint32_t GraphFlags::pack() const {
  std::uint32_t bits = 0;
  if (self_loops) bits |= 1u;
  if (symmetry_dedup) bits |= 2u;
  if (probabilistic_visited) bits |= 4u;
  if (all_starts) bits |= 8u;
  return bits;
}

GraphFlags GraphFlags::unpack(std::uint32_t bits) {
  GraphFlags f;
  f.self_loops = bits & 1u;
  f.symmetry_dedup = bits & 2u;
  f.probabilistic_visited = bits & 4u;
  f.all_starts = bits & 8u;
  return f;
}

WorkFunction WorkFunctionGraph::node_work_function(std::uint32_t id) const {
  auto vals = node(id);
  return WorkFunction(instance_, std::vector<std::int64_t>(vals.begin(), vals.end()));
}

std::uint32_t WorkFunctionGraph::add_node_raw(std::span<const std::int32_t> values) {
  assert(values.size() == instance_->config_count());
  node_pool_.insert(node_pool_.end(), values.begin(), values.end());
  return node_count_++;
}

void WorkFunctionGraph::add_edge(WFEdge e) { edges_.push_back(e); }

std::vector<std::int32_t> canonicalize_node(const Instance& instance,
                                            std::span<const std::int32_t> wf) {
  if (instance.symmetry_count() == 0)
    throw UnsupportedSymmetryError("symmetry canonicalization needs a circle metric");
  const std::uint32_t n = instance.config_count();
  std::vector<std::int32_t> best(wf.begin(), wf.end());
  std::vector<std::int32_t> image(n);
  for (int s = 0; s < instance.symmetry_count(); ++s) {
    const auto perm = instance.symmetry(s);
    for (std::uint32_t i = 0; i < n; ++i) image[perm[i]] = wf[i];
    if (image < best) best = image;
  }
  return best;
}

WorkFunctionGraph build_graph(std::shared_ptr<const Instance> instance,
                              const Configuration& c0, const BuildOptions& options) {
  const Instance& inst = *instance;
  const int m = inst.m();

  GraphFlags flags;
  flags.self_loops = options.self_loops;
  flags.symmetry_dedup = options.symmetry_dedup;
  flags.probabilistic_visited = options.probabilistic_visited;
  flags.all_starts = options.all_starts;
  if (flags.symmetry_dedup && inst.symmetry_count() == 0)
    throw UnsupportedSymmetryError("symmetry dedup needs a circle metric");

  WorkFunctionGraph graph(instance, flags);

  // Exact mode keys the visited map on the full vector; probabilistic mode
  // keys a Bloom filter plus a fingerprint map for successor-id resolution.
  std::unordered_map<std::vector<std::int32_t>, std::uint32_t, VectorKeyHash> visited;
  std::unordered_map<std::uint64_t, std::uint32_t> fingerprints;
  BloomFilter bloom(options.probabilistic_visited ? options.bloom_bits : 64,
                    options.bloom_hashes);

  auto intern = [&](const std::vector<std::int32_t>& vec,
                    bool& is_new) -> std::uint32_t {
    is_new = false;
    if (flags.probabilistic_visited) {
      const std::uint64_t fp = vec_hash(vec);
      if (bloom.test_and_set(fp)) {
        auto it = fingerprints.find(fp);
        return it == fingerprints.end() ? kUnresolvedNode : it->second;
      }
      if (graph.node_count() >= options.node_cap)
        throw EnumerationOverflowError(options.node_cap,
                                       "node budget of " + std::to_string(options.node_cap) +
                                           " exceeded during enumeration");
      const std::uint32_t id = graph.add_node_raw(vec);
      fingerprints.emplace(fp, id);
      is_new = true;
      return id;
    }
    auto it = visited.find(vec);
    if (it != visited.end()) return it->second;
    if (graph.node_count() >= options.node_cap)
      throw EnumerationOverflowError(options.node_cap,
                                     "node budget of " + std::to_string(options.node_cap) +
                                         " exceeded during enumeration");
    const std::uint32_t id = graph.add_node_raw(vec);
    visited.emplace(vec, id);
    is_new = true;
    return id;
  };

  // Seed the frontier: normalize(w_0) for C0, and in all-starts mode the
  // initial work function of every configuration, in dense-index order.
  std::vector<std::uint32_t> frontier;
  bool is_new = false;
  auto seed = [&](const Configuration& start_cfg) {
    auto norm = normalize(initial_work_function(instance, start_cfg));
    std::vector<std::int32_t> vec(norm.wf.values().begin(), norm.wf.values().end());
    if (flags.symmetry_dedup) vec = canonicalize_node(inst, vec);
    const std::uint32_t id = intern(vec, is_new);
    if (is_new) frontier.push_back(id);
    return id;
  };
  graph.set_start(seed(c0));
  if (options.all_starts)
    for (std::uint32_t i = 0; i < inst.config_count(); ++i) seed(inst.config(i));
  while (!frontier.empty()) {
    // One level at a time: successor computation shards across workers,
    // node-id assignment stays sequential in (frontier, request) order.
    const std::size_t tasks = frontier.size() * static_cast<std::size_t>(m);
    std::vector<Successor> results(tasks);
    parallel_chunks(tasks, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t t = begin; t < end; ++t) {
        const std::uint32_t u = frontier[t / m];
        const int r = static_cast<int>(t % m);
        results[t] = successor_of(inst, graph.node(u), r, flags.symmetry_dedup);
      }
    });

    std::vector<std::uint32_t> next_frontier;
    for (std::size_t t = 0; t < tasks; ++t) {
      const std::uint32_t u = frontier[t / m];
      const int r = static_cast<int>(t % m);
      Successor& s = results[t];
      const std::uint32_t v = intern(s.vec, is_new);
      if (is_new) next_frontier.push_back(v);
      if (v == kUnresolvedNode) graph.note_unresolved();
      if (!flags.self_loops && v == u) continue;
      graph.add_edge(WFEdge{u, static_cast<std::uint16_t>(r), v, s.grad, s.dopt});
    }
    frontier = std::move(next_frontier);
  }
  return graph;
}

// ---------------------------------------------------------------------------
// Binary format. Layout documented in FORMATS.md; all integers little endian.
// ---------------------------------------------------------------------------

namespace {

class ByteSink {
 public:
  explicit ByteSink(std::ostream* out) : out_(out) {}

  void write(const void* data, std::size_t len) {
    hash_ = fnv1a64(data, len, hash_);
    if (out_) out_->write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
  }
  void u8(std::uint8_t v) { write(&v, 1); }
  void u16(std::uint16_t v) { put_le(v); }
  void u32(std::uint32_t v) { put_le(v); }
  void u64(std::uint64_t v) { put_le(v); }
  void i32(std::int32_t v) { put_le(static_cast<std::uint32_t>(v)); }
  std::uint64_t hash() const { return hash_; }

 private:
  template <typename T>
  void put_le(T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = (v >> (8 * i)) & 0xFF;
    write(buf, sizeof(T));
  }

  std::ostream* out_;
  std::uint64_t hash_ = kFnvOffset;
};

void serialize_graph(const WorkFunctionGraph& graph, ByteSink& sink) {
  const Instance& inst = graph.instance();
  sink.write(kMagic, 4);
  sink.u32(kFormatVersion);
  sink.u32(static_cast<std::uint32_t>(inst.k()));
  sink.u32(static_cast<std::uint32_t>(inst.m()));
  sink.u32(inst.space().kind() == MetricKind::Circle ? 0 : 1);
  sink.u64(graph.node_count());
  sink.u64(graph.edges().size());
  sink.u32(graph.start());
  sink.u32(graph.flags().pack());
  if (inst.space().kind() == MetricKind::Explicit) {
    for (int i = 0; i < inst.m(); ++i)
      for (int j = 0; j < inst.m(); ++j)
        sink.u32(static_cast<std::uint32_t>(inst.space().dist(i, j)));
    sink.u8(inst.space().has_antipode() ? 1 : 0);
    if (inst.space().has_antipode())
      for (int i = 0; i < inst.m(); ++i)
        sink.u32(static_cast<std::uint32_t>(inst.space().antipode(i)));
  }
  for (std::uint32_t id = 0; id < graph.node_count(); ++id)
    for (std::int32_t v : graph.node(id)) sink.u32(static_cast<std::uint32_t>(v));
  for (const WFEdge& e : graph.edges()) {
    sink.u32(e.u);
    sink.u16(e.r);
    sink.u32(e.v);
    sink.i32(e.grad);
    sink.i32(e.dopt);
  }
}

class ByteReader {
 public:
  ByteReader(const unsigned char* data, std::size_t len) : data_(data), len_(len) {}

  void read(void* out, std::size_t len) {
    if (pos_ + len > len_) throw TruncatedFileError("graph file ends unexpectedly");
    std::memcpy(out, data_ + pos_, len);
    pos_ += len;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    read(&v, 1);
    return v;
  }
  std::uint16_t u16() { return get_le<std::uint16_t>(); }
  std::uint32_t u32() { return get_le<std::uint32_t>(); }
  std::uint64_t u64() { return get_le<std::uint64_t>(); }
  std::int32_t i32() { return static_cast<std::int32_t>(get_le<std::uint32_t>()); }
  std::size_t pos() const { return pos_; }

 private:
  template <typename T>
  T get_le() {
    unsigned char buf[sizeof(T)];
    read(buf, sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }

  const unsigned char* data_;
  std::size_t len_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t WorkFunctionGraph::checksum() const {
  ByteSink sink(nullptr);
  serialize_graph(*this, sink);
  return sink.hash();
}

void save_graph(const WorkFunctionGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  ByteSink sink(&out);
  serialize_graph(graph, sink);
  const std::uint64_t sum = sink.hash();
  unsigned char buf[8];
  for (std::size_t i = 0; i < 8; ++i) buf[i] = (sum >> (8 * i)) & 0xFF;
  out.write(reinterpret_cast<const char*>(buf), 8);
  if (!out) throw IoError("write failed: " + path.string());
}

WorkFunctionGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  constexpr std::size_t kHeaderLen = 44;
  if (bytes.size() < 12) throw TruncatedFileError("graph file too short");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("not a work-function graph file (bad magic)");

  ByteReader reader(bytes.data(), bytes.size());
  char magic[4];
  reader.read(magic, 4);
  const std::uint32_t version = reader.u32();
  if (version != kFormatVersion)
    throw VersionError("unsupported graph format version " + std::to_string(version));
  if (bytes.size() < kHeaderLen + 8) throw TruncatedFileError("graph file too short");

  const int k = static_cast<int>(reader.u32());
  const int m = static_cast<int>(reader.u32());
  const std::uint32_t metric_kind = reader.u32();
  const std::uint64_t node_count = reader.u64();
  const std::uint64_t edge_count = reader.u64();
  const std::uint32_t start = reader.u32();
  const GraphFlags flags = GraphFlags::unpack(reader.u32());
  if (k < 1 || m < 1 || node_count > (1ull << 40) || edge_count > (1ull << 44))
    throw FormatError("implausible graph header");

  // Length check before the checksum so truncation is reported as such.
  const std::uint64_t width = ConfigIndexer(k, m).count();
  std::uint64_t metric_block = 0;
  if (metric_kind == 1) {
    metric_block = static_cast<std::uint64_t>(m) * m * 4 + 1;
    const std::size_t flag_at = kHeaderLen + static_cast<std::size_t>(m) * m * 4;
    if (bytes.size() <= flag_at) throw TruncatedFileError("graph file ends unexpectedly");
    if (bytes[flag_at]) metric_block += static_cast<std::uint64_t>(m) * 4;
  } else if (metric_kind != 0) {
    throw FormatError("unknown metric kind " + std::to_string(metric_kind));
  }
  const std::uint64_t body_len =
      kHeaderLen + metric_block + node_count * width * 4 + edge_count * 18;
  if (bytes.size() < body_len + 8) throw TruncatedFileError("graph file ends unexpectedly");
  if (bytes.size() > body_len + 8) throw FormatError("trailing bytes in graph file");

  std::uint64_t stored = 0;
  for (std::size_t i = 0; i < 8; ++i)
    stored |= static_cast<std::uint64_t>(bytes[body_len + i]) << (8 * i);
  if (fnv1a64(bytes.data(), body_len, kFnvOffset) != stored)
    throw ChecksumError("graph file checksum mismatch");

  std::shared_ptr<const Instance> instance;
  if (metric_kind == 0) {
    instance = std::make_shared<Instance>(MetricSpace::circle(m), k);
  } else {
    std::vector<std::vector<std::int64_t>> dist(m, std::vector<std::int64_t>(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) dist[i][j] = reader.u32();
    std::optional<std::vector<int>> antipode;
    if (reader.u8()) {
      antipode.emplace(m);
      for (int i = 0; i < m; ++i) (*antipode)[i] = static_cast<int>(reader.u32());
    }
    instance = std::make_shared<Instance>(
        MetricSpace::from_matrix(std::move(dist), std::move(antipode)), k);
  }

  WorkFunctionGraph graph(instance, flags);
  std::vector<std::int32_t> vec(width);
  for (std::uint64_t id = 0; id < node_count; ++id) {
    for (std::uint32_t i = 0; i < width; ++i) vec[i] = static_cast<std::int32_t>(reader.u32());
    graph.add_node_raw(vec);
  }
  for (std::uint64_t i = 0; i < edge_count; ++i) {
    WFEdge e;
    e.u = reader.u32();
    e.r = reader.u16();
    e.v = reader.u32();
    e.grad = reader.i32();
    e.dopt = reader.i32();
    if (e.u >= node_count || (e.v >= node_count && e.v != kUnresolvedNode) ||
        e.r >= static_cast<std::uint16_t>(m))
      throw FormatError("edge endpoint out of range");
    if (e.v == kUnresolvedNode) {
      if (!flags.probabilistic_visited) throw FormatError("edge endpoint out of range");
      graph.note_unresolved();
    }
    graph.add_edge(e);
  }
  if (start >= node_count && node_count > 0)
    throw FormatError("start node out of range");
  graph.set_start(start);
  return graph;
}

}  // namespace wfbench
