#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wfbench/metric.hpp"
#include "wfbench/ratio.hpp"
#include "wfbench/workfn.hpp"

namespace wfbench {

/// Canonical potential: h x k index matrix over n auxiliary points (negative
/// index -i means the antipode of a_i) and C(n,2) pair coefficients packed
/// row-major over the upper triangle (i < j).
struct CanonicalSpec {
  int n = 0;
  std::vector<std::vector<int>> index_matrix;
  std::vector<std::int64_t> coefs;

  int rows() const { return static_cast<int>(index_matrix.size()); }
  std::int64_t coef(int i, int j) const;  // 1-based pair (i < j)
};

/// Phi(w) = sum of all entries of w.
struct SumSpec {};

/// Out-of-process potential speaking the line-delimited JSON protocol.
struct ExternalSpec {
  std::vector<std::string> cmd;
  int timeout_ms = 10000;
};

struct PotentialSpec {
  std::variant<CanonicalSpec, SumSpec, ExternalSpec> body;
  std::string name;  // registry key or file stem; informational

  bool is_canonical() const { return std::holds_alternative<CanonicalSpec>(body); }
  const CanonicalSpec& canonical() const { return std::get<CanonicalSpec>(body); }
};

/// Structural checks that do not need a metric: nonzero entries, |entry| <= n,
/// coefficient vector length. Throws ValidationError.
void validate_spec(const CanonicalSpec& spec);

/// The restricted form of the canonical family: one all-(-1) row, index 1 in
/// every other row, and no pair coefficients touching point 1.
bool is_restricted_form(const CanonicalSpec& spec);

/// Registry of the shipped potentials. "unifying" takes its size from k;
/// the rest are fixed. Throws ValidationError on unknown names.
PotentialSpec builtin_potential(const std::string& name, int k);
std::vector<std::string> builtin_names();

// JSON round trip for spec files ({"kind":"canonical",...} etc.) plus the
// canonical serialization used for deterministic tie-breaking.
PotentialSpec parse_potential_spec(const std::string& json_text, int k);
PotentialSpec load_potential_spec_file(const std::string& path, int k);
std::string serialize_potential_spec(const PotentialSpec& spec);

struct CompileOptions {
  std::uint64_t table_budget_bytes = 2ull << 30;
  bool streaming = false;  // recompute assignments on the fly instead of tabulating
};

/// Evaluation interface over normalized node vectors.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual double value(std::span<const std::int32_t> wf) const = 0;
  virtual bool integer_valued() const = 0;

  /// Exact slope of value(w + a*1) in a when the form is linear in shifts
  /// (h for canonical forms, the configuration count for the sum form).
  virtual std::optional<std::int64_t> shift_slope() const = 0;

  /// value(w + shift*1); uses the exact slope when available, otherwise
  /// materializes the shifted vector.
  virtual double value_shifted(std::span<const std::int32_t> wf, std::int64_t shift) const;
};

/// Canonical potential compiled against one instance: all m^n auxiliary
/// assignments in odometer order (a_n fastest), each row resolved to a dense
/// configuration index, plus the per-assignment distance penalty.
class CompiledCanonical : public Potential {
 public:
  CompiledCanonical(std::shared_ptr<const Instance> instance, CanonicalSpec spec,
                    const CompileOptions& options = {});

  std::int64_t evaluate(std::span<const std::int32_t> wf) const;

  double value(std::span<const std::int32_t> wf) const override { return double(evaluate(wf)); }
  bool integer_valued() const override { return true; }
  std::optional<std::int64_t> shift_slope() const override { return spec_.rows(); }

  const CanonicalSpec& spec() const { return spec_; }
  const Instance& instance() const { return *instance_; }
  std::size_t assignment_count() const { return assignments_; }

  /// Tabulated layout (empty in streaming mode): row_indices has
  /// assignment_count()*rows() entries, penalties one per assignment.
  std::span<const std::uint32_t> row_indices() const { return row_indices_; }
  std::span<const std::int64_t> penalties() const { return penalties_; }

  /// Pair-distance penalty of one assignment; works in both tabulated and
  /// streaming mode.
  std::int64_t assignment_penalty(std::size_t a) const;

 private:
  void decode_assignment(std::size_t a, std::span<int> points) const;
  std::int64_t penalty_impl(std::span<const int> points) const;
  void assignment_rows_impl(std::size_t a, std::span<const int> points,
                            std::span<std::uint32_t> out) const;

  std::shared_ptr<const Instance> instance_;
  CanonicalSpec spec_;
  std::size_t assignments_ = 0;
  std::vector<std::uint32_t> row_indices_;
  std::vector<std::int64_t> penalties_;
  bool streaming_ = false;
};

class SumPotential : public Potential {
 public:
  explicit SumPotential(std::shared_ptr<const Instance> instance) : instance_(std::move(instance)) {}

  double value(std::span<const std::int32_t> wf) const override;
  bool integer_valued() const override { return true; }
  std::optional<std::int64_t> shift_slope() const override {
    return static_cast<std::int64_t>(instance_->config_count());
  }

 private:
  std::shared_ptr<const Instance> instance_;
};

/// Bridge to an external process. Calls are serialized; spawn one bridge per
/// worker for parallel evaluation.
class ExternalPotential : public Potential {
 public:
  ExternalPotential(std::shared_ptr<const Instance> instance, ExternalSpec spec);
  ~ExternalPotential() override;

  ExternalPotential(const ExternalPotential&) = delete;
  ExternalPotential& operator=(const ExternalPotential&) = delete;

  double value(std::span<const std::int32_t> wf) const override;
  bool integer_valued() const override { return false; }
  std::optional<std::int64_t> shift_slope() const override { return std::nullopt; }

  /// Last request id the subprocess answered; -1 before the first reply.
  std::int64_t last_acknowledged() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Compiles a spec for an instance. Validates against the metric (antipode
/// availability, matrix width) and enforces the table budget.
std::unique_ptr<Potential> compile_potential(std::shared_ptr<const Instance> instance,
                                             const PotentialSpec& spec,
                                             const CompileOptions& options = {});

/// Normalized-criterion lift: psi + (c+1)*shift. psi is in 1/c.den units
/// when c is rational; for integer c this is the plain formula.
inline std::int64_t lift_scaled(std::int64_t psi_scaled, std::int64_t shift, Ratio c) {
  return psi_scaled + (c.num + c.den) * shift;
}

}  // namespace wfbench
