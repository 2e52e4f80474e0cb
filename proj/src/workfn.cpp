#include "wfbench/workfn.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace wfbench {

WorkFunction::WorkFunction(std::shared_ptr<const Instance> instance,
                           std::vector<std::int64_t> values)
    : instance_(std::move(instance)), values_(std::move(values)) {
  if (values_.size() != instance_->config_count())
    throw ValidationError("work function length does not match configuration count");
}

std::int64_t WorkFunction::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

bool WorkFunction::is_lipschitz() const {
  const std::uint32_t n = instance_->config_count();
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      if (std::abs(values_[a] - values_[b]) > instance_->config_dist(a, b)) return false;
  return true;
}

WorkFunction initial_work_function(std::shared_ptr<const Instance> instance,
                                   const Configuration& c0) {
  const std::uint32_t c0_idx = instance->indexer().to_index(c0);
  const std::uint32_t n = instance->config_count();
  std::vector<std::int64_t> values(n);
  for (std::uint32_t i = 0; i < n; ++i) values[i] = instance->config_dist(c0_idx, i);
  return WorkFunction(instance, std::move(values));
}

UpdateResult update_with_costs(const WorkFunction& w, int r) {
  const Instance& inst = w.instance();
  if (r < 0 || r >= inst.m())
    throw InvalidRequestError("request point out of range: " + std::to_string(r));

  const std::uint32_t n = inst.config_count();
  const auto old_values = w.values();
  std::vector<std::int64_t> next(n, std::numeric_limits<std::int64_t>::max());

  // T_r(w)(X) = min over Y containing r of w(Y) + d(X, Y).
  for (std::uint32_t y : inst.configs_containing(r)) {
    const std::int64_t wy = old_values[y];
    const std::int32_t* drow = inst.config_dist_row(y).data();
    for (std::uint32_t x = 0; x < n; ++x) {
      const std::int64_t cand = wy + drow[x];
      if (cand < next[x]) next[x] = cand;
    }
  }

  std::int64_t grad = 0;
  std::int64_t old_min = std::numeric_limits<std::int64_t>::max();
  std::int64_t new_min = std::numeric_limits<std::int64_t>::max();
  for (std::uint32_t x = 0; x < n; ++x) {
    assert(next[x] >= old_values[x]);
    grad = std::max(grad, next[x] - old_values[x]);
    old_min = std::min(old_min, old_values[x]);
    new_min = std::min(new_min, next[x]);
  }
  return UpdateResult{WorkFunction(w.instance_ptr(), std::move(next)), grad,
                      new_min - old_min};
}

WorkFunction update(const WorkFunction& w, int r) { return update_with_costs(w, r).next; }

std::int64_t extended_cost(const WorkFunction& w, int r) {
  return update_with_costs(w, r).grad;
}

std::int64_t opt_increase(const WorkFunction& w, int r) {
  return update_with_costs(w, r).dopt;
}

NormalizedWorkFunction normalize(const WorkFunction& w) {
  const std::int64_t shift = w.min_value();
  std::vector<std::int64_t> values(w.values().begin(), w.values().end());
  for (auto& v : values) v -= shift;
  return NormalizedWorkFunction{WorkFunction(w.instance_ptr(), std::move(values)), shift};
}

Configuration wfa_step(const WorkFunction& w_next, const Configuration& x_cur) {
  const Instance& inst = w_next.instance();
  const std::uint32_t cur = inst.indexer().to_index(x_cur);
  const std::uint32_t n = inst.config_count();
  std::uint32_t best = 0;
  std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
  for (std::uint32_t y = 0; y < n; ++y) {
    const std::int64_t cost = w_next.value(y) + inst.config_dist(cur, y);
    if (cost < best_cost) {
      best_cost = cost;
      best = y;
    }
  }
  return inst.config(best);
}

}  // namespace wfbench
