#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "wfbench/metric.hpp"

namespace wfbench {

/// Work function as a value object: one integer per configuration, indexed
/// by the instance's ConfigIndexer.
class WorkFunction {
 public:
  WorkFunction(std::shared_ptr<const Instance> instance, std::vector<std::int64_t> values);

  const Instance& instance() const { return *instance_; }
  const std::shared_ptr<const Instance>& instance_ptr() const { return instance_; }
  std::span<const std::int64_t> values() const { return values_; }
  std::int64_t value(std::uint32_t idx) const { return values_[idx]; }
  std::int64_t min_value() const;

  /// Exhaustive 1-Lipschitz check; O(count^2), meant for tests and small
  /// instances.
  bool is_lipschitz() const;

  bool operator==(const WorkFunction& other) const { return values_ == other.values_; }

 private:
  std::shared_ptr<const Instance> instance_;
  std::vector<std::int64_t> values_;
};

/// w_0 relative to a start configuration: w(X) = matching distance from C0.
WorkFunction initial_work_function(std::shared_ptr<const Instance> instance,
                                   const Configuration& c0);

struct UpdateResult {
  WorkFunction next;
  std::int64_t grad;  // extended cost of this request
  std::int64_t dopt;  // OPT increase of this request
};

/// Applies the request operator and reports both per-request costs in one
/// pass; the building block behind update / extended_cost / opt_increase.
UpdateResult update_with_costs(const WorkFunction& w, int r);

WorkFunction update(const WorkFunction& w, int r);
std::int64_t extended_cost(const WorkFunction& w, int r);
std::int64_t opt_increase(const WorkFunction& w, int r);

struct NormalizedWorkFunction {
  WorkFunction wf;
  std::int64_t shift;
};

/// Subtracts the minimum; the returned shift is what was removed.
NormalizedWorkFunction normalize(const WorkFunction& w);

/// The algorithm's move rule: argmin over Y of w_next(Y) + d(X_cur, Y),
/// ties broken by lowest dense index.
Configuration wfa_step(const WorkFunction& w_next, const Configuration& x_cur);

}  // namespace wfbench
