#include "wfbench/metric.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace wfbench {

MetricSpace MetricSpace::circle(int m) {
  if (m < 2) throw ValidationError("circle metric needs at least 2 points");
  MetricSpace s;
  s.kind_ = MetricKind::Circle;
  s.m_ = m;
  s.dist_.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      int d = std::abs(i - j);
      s.dist_[static_cast<std::size_t>(i) * m + j] = std::min(d, m - d);
    }
  }
  if (m % 2 == 0) {
    s.antipode_.resize(m);
    for (int i = 0; i < m; ++i) s.antipode_[i] = (i + m / 2) % m;
  }
  s.max_dist_ = m / 2;
  return s;
}

MetricSpace MetricSpace::from_matrix(std::vector<std::vector<std::int64_t>> dist,
                                     std::optional<std::vector<int>> antipode) {
  MetricSpace s;
  s.kind_ = MetricKind::Explicit;
  s.m_ = static_cast<int>(dist.size());
  if (s.m_ < 1) throw ValidationError("distance matrix is empty");
  s.dist_.reserve(static_cast<std::size_t>(s.m_) * s.m_);
  for (const auto& row : dist) {
    if (static_cast<int>(row.size()) != s.m_)
      throw ValidationError("distance matrix is not square");
    for (std::int64_t d : row) s.dist_.push_back(d);
  }
  if (antipode) {
    if (static_cast<int>(antipode->size()) != s.m_)
      throw ValidationError("antipode map has wrong length");
    s.antipode_ = std::move(*antipode);
  }
  s.max_dist_ = *std::max_element(s.dist_.begin(), s.dist_.end());
  s.validate();
  return s;
}

void MetricSpace::validate() const {
  for (int i = 0; i < m_; ++i) {
    if (dist(i, i) != 0) throw ValidationError("nonzero diagonal in distance matrix");
    for (int j = 0; j < m_; ++j) {
      if (dist(i, j) < 0) throw ValidationError("negative distance");
      if (dist(i, j) != dist(j, i)) throw ValidationError("asymmetric distance matrix");
      if (i != j && dist(i, j) == 0) throw ValidationError("zero distance off the diagonal");
    }
  }
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      for (int l = 0; l < m_; ++l)
        if (dist(i, j) > dist(i, l) + dist(l, j))
          throw ValidationError("triangle inequality violated");
  if (!antipode_.empty()) {
    for (int i = 0; i < m_; ++i) {
      int a = antipode_[i];
      if (a < 0 || a >= m_) throw ValidationError("antipode out of range");
      if (antipode_[a] != i) throw ValidationError("antipode map is not an involution");
    }
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        if (dist(i, j) != dist(antipode_[i], antipode_[j]))
          throw ValidationError("antipode map is not an isometry");
  }
}

int MetricSpace::antipode(int p) const {
  if (antipode_.empty()) throw ValidationError("metric space has no antipode map");
  return antipode_[p];
}

Configuration::Configuration(std::vector<int> pts) : pts_(std::move(pts)) {
  std::sort(pts_.begin(), pts_.end());
}

bool Configuration::contains(int p) const {
  return std::binary_search(pts_.begin(), pts_.end(), p);
}

std::string Configuration::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    if (i) os << ',';
    os << pts_[i];
  }
  os << '}';
  return os.str();
}

ConfigIndexer::ConfigIndexer(int k, int m) : k_(k), m_(m) {
  if (k < 1) throw ValidationError("server count must be positive");
  if (m < 1) throw ValidationError("point count must be positive");
  int rows = m + k + 1;
  binom_.assign(static_cast<std::size_t>(rows) * (k + 1), 0);
  for (int n = 0; n < rows; ++n) {
    binom_[static_cast<std::size_t>(n) * (k + 1)] = 1;
    for (int r = 1; r <= std::min(n, k); ++r) {
      binom_[static_cast<std::size_t>(n) * (k + 1) + r] =
          binom(n - 1, r - 1) + binom(n - 1, r);
    }
  }
  std::uint64_t c = binom(m + k - 1, k);
  if (c > 0xFFFFFFFFull) throw ValidationError("configuration count exceeds 32-bit index space");
  count_ = static_cast<std::uint32_t>(c);
}

std::uint64_t ConfigIndexer::binom(int n, int r) const {
  if (r < 0 || r > k_ || n < 0) return 0;
  if (r > n) return 0;
  return binom_[static_cast<std::size_t>(n) * (k_ + 1) + r];
}

std::uint32_t ConfigIndexer::to_index(const Configuration& config) const {
  if (config.size() != k_)
    throw InvalidConfigurationError("configuration has wrong number of points");
  std::uint64_t rank = 0;
  const auto& pts = config.points();
  for (int i = 0; i < k_; ++i) {
    int p = pts[i];
    if (p < 0 || p >= m_)
      throw InvalidConfigurationError("point index out of range: " + std::to_string(p));
    // colex rank of the strictly-increasing image p_i + i
    rank += binom(p + i, i + 1);
  }
  return static_cast<std::uint32_t>(rank);
}

Configuration ConfigIndexer::to_config(std::uint32_t idx) const {
  if (idx >= count_) throw InvalidIndexError("configuration index out of range");
  std::vector<int> pts(k_);
  std::uint64_t rem = idx;
  for (int i = k_; i >= 1; --i) {
    // largest d with C(d, i) <= rem
    int d = i - 1;
    while (binom(d + 1, i) <= rem) ++d;
    rem -= binom(d, i);
    pts[i - 1] = d - (i - 1);
  }
  return Configuration(std::move(pts));
}

std::int64_t matching_distance(const MetricSpace& space, const Configuration& x,
                               const Configuration& y) {
  if (x.size() != y.size())
    throw InvalidConfigurationError("matching_distance needs equal-size configurations");
  const auto& xs = x.points();
  std::vector<int> perm = y.points();  // sorted, so next_permutation covers all
  std::int64_t best = -1;
  do {
    std::int64_t cost = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) cost += space.dist(xs[i], perm[i]);
    if (best < 0 || cost < best) best = cost;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {

std::vector<std::uint32_t> config_index_permutation(
    const ConfigIndexer& indexer, const std::vector<int>& point_map) {
  std::vector<std::uint32_t> perm(indexer.count());
  for (std::uint32_t i = 0; i < indexer.count(); ++i) {
    std::vector<int> pts = indexer.to_config(i).points();
    for (int& p : pts) p = point_map[p];
    perm[i] = indexer.to_index(Configuration(std::move(pts)));
  }
  return perm;
}

}  // namespace

Instance::Instance(MetricSpace space, int k)
    : space_(std::move(space)), indexer_(k, space_.points()) {
  const std::uint32_t n = indexer_.count();
  configs_.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) configs_.push_back(indexer_.to_config(i));

  cfg_dist_.assign(static_cast<std::size_t>(n) * n, 0);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      std::int64_t d = matching_distance(space_, configs_[a], configs_[b]);
      cfg_dist_[static_cast<std::size_t>(a) * n + b] = static_cast<std::int32_t>(d);
      cfg_dist_[static_cast<std::size_t>(b) * n + a] = static_cast<std::int32_t>(d);
      max_cfg_dist_ = std::max(max_cfg_dist_, d);
    }
  }

  contains_.resize(space_.points());
  for (std::uint32_t i = 0; i < n; ++i)
    for (int p : configs_[i].points())
      if (contains_[p].empty() || contains_[p].back() != i) contains_[p].push_back(i);

  if (space_.kind() == MetricKind::Circle) {
    const int m = space_.points();
    sym_perms_.reserve(2 * m);
    std::vector<int> point_map(m);
    for (int s = 0; s < m; ++s) {
      for (int p = 0; p < m; ++p) point_map[p] = (p + s) % m;
      sym_perms_.push_back(config_index_permutation(indexer_, point_map));
    }
    for (int s = 0; s < m; ++s) {
      for (int p = 0; p < m; ++p) point_map[p] = ((m - p) % m + s) % m;
      sym_perms_.push_back(config_index_permutation(indexer_, point_map));
    }
  }
}

std::span<const std::uint32_t> Instance::configs_containing(int r) const {
  if (r < 0 || r >= space_.points())
    throw InvalidRequestError("request point out of range: " + std::to_string(r));
  return contains_[r];
}

std::shared_ptr<const Instance> load_instance(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  const std::string kind = j.at("kind").get<std::string>();
  const int k = j.at("k").get<int>();
  if (kind == "circle") {
    return std::make_shared<Instance>(MetricSpace::circle(j.at("m").get<int>()), k);
  }
  if (kind == "explicit") {
    auto dist = j.at("dist").get<std::vector<std::vector<std::int64_t>>>();
    std::optional<std::vector<int>> antipode;
    if (j.contains("antipode") && !j.at("antipode").is_null())
      antipode = j.at("antipode").get<std::vector<int>>();
    return std::make_shared<Instance>(
        MetricSpace::from_matrix(std::move(dist), std::move(antipode)), k);
  }
  throw ValidationError("unknown metric kind: " + kind);
}

std::shared_ptr<const Instance> load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metric file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_instance(ss.str());
}

}  // namespace wfbench
