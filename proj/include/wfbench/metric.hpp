#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wfbench/errors.hpp"

namespace wfbench {

enum class MetricKind { Circle, Explicit };

/// Finite metric space over points 0..m-1 with integer distances and an
/// optional antipode involution. Immutable after construction.
class MetricSpace {
 public:
  static MetricSpace circle(int m);
  static MetricSpace from_matrix(std::vector<std::vector<std::int64_t>> dist,
                                 std::optional<std::vector<int>> antipode);

  MetricKind kind() const { return kind_; }
  int points() const { return m_; }
  std::int64_t dist(int i, int j) const { return dist_[static_cast<std::size_t>(i) * m_ + j]; }
  bool has_antipode() const { return !antipode_.empty(); }
  int antipode(int p) const;
  std::int64_t max_dist() const { return max_dist_; }

 private:
  MetricSpace() = default;
  void validate() const;

  MetricKind kind_ = MetricKind::Explicit;
  int m_ = 0;
  std::vector<std::int64_t> dist_;  // row-major m*m
  std::vector<int> antipode_;       // empty when absent
  std::int64_t max_dist_ = 0;
};

/// Multiset of k points kept in nondecreasing order.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<int> pts);

  const std::vector<int>& points() const { return pts_; }
  int size() const { return static_cast<int>(pts_.size()); }
  bool contains(int p) const;

  bool operator==(const Configuration&) const = default;
  auto operator<=>(const Configuration&) const = default;

  std::string to_string() const;

 private:
  std::vector<int> pts_;
};

/// Bijection between k-multisets over m points and dense indices
/// 0..C(m+k-1,k)-1, in colexicographic rank order.
class ConfigIndexer {
 public:
  ConfigIndexer(int k, int m);

  int k() const { return k_; }
  int m() const { return m_; }
  std::uint32_t count() const { return count_; }

  std::uint32_t to_index(const Configuration& config) const;
  Configuration to_config(std::uint32_t idx) const;

 private:
  std::uint64_t binom(int n, int r) const;

  int k_;
  int m_;
  std::uint32_t count_;
  std::vector<std::uint64_t> binom_;  // (m+k) x (k+1)
};

/// Minimum matching cost between two equal-size configurations
/// (exhaustive minimum over assignments; fine for the k<=5 instances this
/// project targets, and the seam where a polynomial solver would go).
std::int64_t matching_distance(const MetricSpace& space, const Configuration& x,
                               const Configuration& y);

/// A metric space fixed together with a server count, plus the precomputed
/// tables every hot loop needs: the full config list, pairwise matching
/// distances, per-request config lists and (for circles) the symmetry
/// permutations of the config index set.
class Instance {
 public:
  Instance(MetricSpace space, int k);

  const MetricSpace& space() const { return space_; }
  const ConfigIndexer& indexer() const { return indexer_; }
  int k() const { return indexer_.k(); }
  int m() const { return space_.points(); }
  std::uint32_t config_count() const { return indexer_.count(); }

  const Configuration& config(std::uint32_t idx) const { return configs_[idx]; }
  std::int64_t config_dist(std::uint32_t a, std::uint32_t b) const {
    return cfg_dist_[static_cast<std::size_t>(a) * indexer_.count() + b];
  }
  std::span<const std::int32_t> config_dist_row(std::uint32_t a) const {
    return {cfg_dist_.data() + static_cast<std::size_t>(a) * indexer_.count(), indexer_.count()};
  }
  std::span<const std::uint32_t> configs_containing(int r) const;

  /// Largest matching distance over all configuration pairs; bounds every
  /// normalized work-function value.
  std::int64_t max_config_dist() const { return max_cfg_dist_; }

  /// Circle symmetries acting on config indices: 2m permutations
  /// (m rotations and m rotations composed with reflection).
  /// Empty for non-circle spaces.
  int symmetry_count() const { return static_cast<int>(sym_perms_.size()); }
  std::span<const std::uint32_t> symmetry(int s) const { return sym_perms_[s]; }

 private:
  MetricSpace space_;
  ConfigIndexer indexer_;
  std::vector<Configuration> configs_;
  std::vector<std::int32_t> cfg_dist_;  // count x count
  std::vector<std::vector<std::uint32_t>> contains_;
  std::vector<std::vector<std::uint32_t>> sym_perms_;
  std::int64_t max_cfg_dist_ = 0;
};

/// Parses {"kind":"circle","k":..,"m":..} or
/// {"kind":"explicit","k":..,"dist":[[..]],"antipode":[..]|null}.
std::shared_ptr<const Instance> load_instance(const std::string& json_text);
std::shared_ptr<const Instance> load_instance_file(const std::string& path);

}  // namespace wfbench
