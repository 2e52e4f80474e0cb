#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wfbench/graph.hpp"
#include "wfbench/metrics.hpp"
#include "wfbench/potential.hpp"
#include "wfbench/ratio.hpp"

namespace wfbench {

struct ProxyConfig {
  std::uint64_t sample_size = 50'000;        // quick-stage edges per evaluation
  std::uint64_t confirm_sample_size = 200'000;
  std::size_t hard_cache_capacity = 4096;
  std::uint64_t early_stop_violations = 0;   // 0 disables early stopping
  std::uint64_t rng_seed = 1234;
};

/// Edges that keep getting violated, evicted least-recently-violated beyond
/// capacity. Iteration order is ascending edge id so runs are reproducible.
class HardEdgeCache {
 public:
  explicit HardEdgeCache(std::size_t capacity) : capacity_(capacity) {}

  void record_violations(std::span<const std::uint32_t> edge_ids);
  std::vector<std::uint32_t> edges() const;
  std::size_t size() const { return last_violated_.size(); }

 private:
  std::size_t capacity_;
  std::uint64_t stamp_ = 0;
  std::unordered_map<std::uint32_t, std::uint64_t> last_violated_;
};

struct ProxyResult {
  std::uint64_t violations = 0;
  bool early_stopped = false;
  std::uint64_t edges_checked = 0;
  std::uint64_t nodes_evaluated = 0;
  std::vector<std::uint32_t> violated_edges;
};

/// Violation estimate over (hard cache ∪ random sample) edges with per-node
/// memoization and optional early stopping. With sample_size >= edge count
/// and early stopping off this is the exact violation count. salt
/// distinguishes candidates evaluated under the same seed.
ProxyResult proxy_score(const WorkFunctionGraph& graph, const Potential& potential, Ratio c,
                        std::uint64_t sample_size, std::uint64_t early_stop_violations,
                        const HardEdgeCache& cache, std::uint64_t rng_seed,
                        std::uint64_t salt);

enum class Stage { Quick, Confirm, Final };

struct Candidate {
  PotentialSpec spec;
  std::string provenance;
  Stage stage = Stage::Quick;
};

struct CandidateScore {
  bool ok = false;
  std::string error;           // set when !ok (malformed spec, compile failure)
  Stage stage = Stage::Quick;
  std::uint64_t proxy_violations = 0;
  bool early_stopped = false;
};

/// Strategy side of the ask/tell loop. Single-threaded by contract: the loop
/// serializes ask/tell; only evaluation fans out to workers.
class PotentialFamily {
 public:
  virtual ~PotentialFamily() = default;
  virtual std::vector<Candidate> ask(std::size_t max_batch) = 0;
  virtual void tell(const Candidate& candidate, const CandidateScore& score) = 0;
  virtual std::vector<PotentialSpec> final_candidates() const = 0;
};

struct SearchBudget {
  std::uint64_t max_evaluations = 1000;
  double max_seconds = 0;  // 0 = no wall-clock limit
};

struct SearchOutcome {
  PotentialSpec best;
  EvaluationReport best_report;
  struct HistoryEntry {
    std::string spec;  // canonical serialization
    std::string provenance;
    Stage stage;
    std::uint64_t proxy_violations;
    bool early_stopped;
    bool error;
  };
  std::vector<HistoryEntry> history;
  std::uint64_t proxy_evaluations = 0;
  std::uint64_t exact_evaluations = 0;
  double wall_seconds = 0;
};

/// Runs the ask/tell loop against a family, then fully evaluates the family's
/// final candidates plus the seed with the exact evaluator. Best is chosen by
/// (violations_k, l1, l2), ties broken on the serialized spec.
SearchOutcome ask_tell_loop(const WorkFunctionGraph& graph, Ratio c, PotentialFamily& family,
                            const PotentialSpec& seed, const ProxyConfig& proxy,
                            const SearchBudget& budget);

/// Family that proposes its seed once and nothing else.
class NaiveFamily : public PotentialFamily {
 public:
  explicit NaiveFamily(PotentialSpec seed) : seed_(std::move(seed)) {}
  std::vector<Candidate> ask(std::size_t max_batch) override;
  void tell(const Candidate&, const CandidateScore&) override {}
  std::vector<PotentialSpec> final_candidates() const override { return {seed_}; }

 private:
  PotentialSpec seed_;
  bool asked_ = false;
};

/// Hill climb over the pair-coefficient vector with escalating step sizes.
class CoefficientLocalFamily : public PotentialFamily {
 public:
  CoefficientLocalFamily(CanonicalSpec seed, std::vector<std::int64_t> step_magnitudes,
                         std::size_t final_count = 8);
  std::vector<Candidate> ask(std::size_t max_batch) override;
  void tell(const Candidate& candidate, const CandidateScore& score) override;
  std::vector<PotentialSpec> final_candidates() const override;

 private:
  void refill_queue();
  Candidate make_candidate(std::vector<std::int64_t> coefs, const std::string& provenance);

  CanonicalSpec base_;
  std::vector<std::int64_t> magnitudes_;
  std::size_t magnitude_idx_ = 0;
  std::size_t final_count_;
  std::vector<std::int64_t> best_coefs_;
  std::optional<std::uint64_t> best_score_;
  bool improved_this_round_ = false;
  std::size_t outstanding_ = 0;
  std::vector<Candidate> queue_;
  // serialized spec -> best told score, for final ranking
  std::vector<std::pair<std::uint64_t, std::string>> seen_;
  std::unordered_map<std::string, std::vector<std::int64_t>> seen_coefs_;
};

struct StagedConfig {
  std::vector<std::int64_t> jump_magnitudes = {1, 2, 4};
  std::int64_t promote_slack = 2;      // quick -> confirm when within slack of best
  std::size_t final_count = 8;
  std::optional<int> frozen_point;     // 1-based auxiliary index whose pairs stay fixed
  // When set, enumerate every coefficient vector in [lo, hi]^C(n,2) instead
  // of mutating (the exhaustive-sweep mode).
  std::optional<std::pair<std::int64_t, std::int64_t>> exhaustive_range;
};

/// Quick/confirm staged local search over the coefficients of a fixed index
/// matrix. Quick-stage survivors are re-scored at the confirm sample size;
/// violated edges feed the shared hard-edge cache through the loop.
class StagedCoefficientFamily : public PotentialFamily {
 public:
  StagedCoefficientFamily(CanonicalSpec seed, StagedConfig config);
  std::vector<Candidate> ask(std::size_t max_batch) override;
  void tell(const Candidate& candidate, const CandidateScore& score) override;
  std::vector<PotentialSpec> final_candidates() const override;

 private:
  bool slot_frozen(int slot) const;
  void seed_queue();
  void expand_from(const std::vector<std::int64_t>& coefs, std::int64_t magnitude,
                   const std::string& provenance);
  Candidate make_candidate(std::vector<std::int64_t> coefs, Stage stage,
                           const std::string& provenance);

  CanonicalSpec base_;
  StagedConfig config_;
  std::size_t magnitude_idx_ = 0;
  std::vector<Candidate> quick_queue_;
  std::vector<Candidate> confirm_queue_;
  std::unordered_map<std::string, std::vector<std::int64_t>> known_;
  std::optional<std::uint64_t> best_confirm_;
  std::vector<std::int64_t> best_confirm_coefs_;
  bool best_changed_ = false;
  std::vector<std::pair<std::uint64_t, std::string>> confirmed_;
};

SearchOutcome staged_coefficient_search(const WorkFunctionGraph& graph, Ratio c,
                                        const CanonicalSpec& seed, const StagedConfig& stages,
                                        const ProxyConfig& proxy, const SearchBudget& budget);

/// Exact evaluation fast path for many coefficient vectors over one index
/// matrix: per-node row sums and per-assignment pair distances are
/// precomputed once, so each candidate costs one min-scan per node.
class FixedMatrixEvaluator {
 public:
  FixedMatrixEvaluator(const WorkFunctionGraph& graph, const CanonicalSpec& matrix);

  std::size_t coef_slots() const { return pair_count_; }
  std::int64_t node_value(std::uint32_t id, std::span<const std::int64_t> penalties) const;
  void penalties_for(std::span<const std::int64_t> coefs,
                     std::span<std::int64_t> out) const;
  std::size_t assignment_count() const { return assignments_; }

  /// Full exact violation stats of the matrix with the given coefficients.
  ViolationStats exact_violations(Ratio c, std::span<const std::int64_t> coefs) const;

 private:
  const WorkFunctionGraph& graph_;
  CanonicalSpec base_;
  std::size_t assignments_ = 0;
  std::size_t pair_count_ = 0;
  std::vector<std::int32_t> parts_;       // node_count x assignments row sums
  std::vector<std::int32_t> pair_dists_;  // assignments x pair_count
};

std::string outcome_to_json(const SearchOutcome& outcome, const WorkFunctionGraph& graph);

}  // namespace wfbench
