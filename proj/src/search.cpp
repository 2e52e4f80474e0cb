#include "wfbench/search.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <limits>
#include <random>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "wfbench/parallel.hpp"

namespace wfbench {

namespace {

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Quick: return "quick";
    case Stage::Confirm: return "confirm";
    case Stage::Final: return "final";
  }
  return "?";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ull + (salt << 1));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// 1-based (i, j) pairs in coefficient-slot order.
std::vector<std::pair<int, int>> pair_list(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

}  // namespace

void HardEdgeCache::record_violations(std::span<const std::uint32_t> edge_ids) {
  ++stamp_;
  for (std::uint32_t eid : edge_ids) last_violated_[eid] = stamp_;
  while (last_violated_.size() > capacity_) {
    auto oldest = last_violated_.begin();
    for (auto it = std::next(last_violated_.begin()); it != last_violated_.end(); ++it) {
      if (it->second < oldest->second ||
          (it->second == oldest->second && it->first > oldest->first))
        oldest = it;
    }
    last_violated_.erase(oldest);
  }
}

std::vector<std::uint32_t> HardEdgeCache::edges() const {
  std::vector<std::uint32_t> out;
  out.reserve(last_violated_.size());
  for (const auto& [eid, _] : last_violated_) out.push_back(eid);
  std::sort(out.begin(), out.end());
  return out;
}

ProxyResult proxy_score(const WorkFunctionGraph& graph, const Potential& potential, Ratio c,
                        std::uint64_t sample_size, std::uint64_t early_stop_violations,
                        const HardEdgeCache& cache, std::uint64_t rng_seed,
                        std::uint64_t salt) {
  const auto& edges = graph.edges();
  const std::uint64_t edge_count = edges.size();

  // Scan order: cached hard edges first, then the sampled edges.
  std::vector<std::uint32_t> order = cache.edges();
  std::erase_if(order, [&](std::uint32_t eid) { return eid >= edge_count; });
  std::vector<char> chosen(edge_count, 0);
  for (std::uint32_t eid : order) chosen[eid] = 1;

  if (sample_size >= edge_count) {
    for (std::uint32_t eid = 0; eid < edge_count; ++eid)
      if (!chosen[eid]) order.push_back(eid);
  } else {
    // Floyd's sampler: sample_size distinct ids, deterministic under the seed.
    std::mt19937_64 rng(mix_seed(rng_seed, salt));
    std::unordered_set<std::uint64_t> sampled;
    sampled.reserve(sample_size * 2);
    for (std::uint64_t j = edge_count - sample_size; j < edge_count; ++j) {
      std::uint64_t t = rng() % (j + 1);
      if (!sampled.insert(t).second) sampled.insert(j);
    }
    std::vector<std::uint32_t> sample(sampled.begin(), sampled.end());
    std::sort(sample.begin(), sample.end());
    for (std::uint32_t eid : sample)
      if (!chosen[eid]) order.push_back(eid);
  }

  // Each node scored at most once per evaluation.
  std::vector<double> memo(graph.node_count());
  std::vector<char> have(graph.node_count(), 0);
  ProxyResult result;
  auto value_of = [&](std::uint32_t id) {
    if (!have[id]) {
      memo[id] = potential.value(graph.node(id));
      have[id] = 1;
      ++result.nodes_evaluated;
    }
    return memo[id];
  };

  const bool integer_valued = potential.integer_valued();
  for (std::uint32_t eid : order) {
    const WFEdge& e = edges[eid];
    if (e.v == kUnresolvedNode) continue;
    ++result.edges_checked;
    if (edge_violated(e, value_of(e.u), value_of(e.v), integer_valued, c)) {
      ++result.violations;
      result.violated_edges.push_back(eid);
      if (early_stop_violations > 0 && result.violations >= early_stop_violations) {
        result.early_stopped = true;
        break;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Ask/tell loop
// ---------------------------------------------------------------------------

namespace {

struct ExactScore {
  PotentialSpec spec;
  std::string serialized;
  ViolationStats stats;
  std::unique_ptr<Potential> potential;
  NodeValues values;
};

}  // namespace

SearchOutcome ask_tell_loop(const WorkFunctionGraph& graph, Ratio c, PotentialFamily& family,
                            const PotentialSpec& seed, const ProxyConfig& proxy,
                            const SearchBudget& budget) {
  using clock = std::chrono::steady_clock;
  const auto start_time = clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(clock::now() - start_time).count();
  };

  SearchOutcome out;
  HardEdgeCache cache(proxy.hard_cache_capacity);
  const std::size_t workers = static_cast<std::size_t>(worker_count());
  std::uint64_t salt = 0;

  while (out.proxy_evaluations < budget.max_evaluations) {
    if (budget.max_seconds > 0 && elapsed() > budget.max_seconds) break;
    const std::size_t room = static_cast<std::size_t>(
        std::min<std::uint64_t>(workers, budget.max_evaluations - out.proxy_evaluations));
    std::vector<Candidate> batch = family.ask(room);
    if (batch.empty()) break;
    if (batch.size() > room) batch.resize(room);

    std::vector<CandidateScore> scores(batch.size());
    std::vector<ProxyResult> results(batch.size());
    parallel_chunks(batch.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        CandidateScore& score = scores[i];
        score.stage = batch[i].stage;
        try {
          auto potential = compile_potential(graph.instance_ptr(), batch[i].spec);
          const std::uint64_t sample = batch[i].stage == Stage::Confirm
                                           ? proxy.confirm_sample_size
                                           : proxy.sample_size;
          results[i] = proxy_score(graph, *potential, c, sample,
                                   proxy.early_stop_violations, cache, proxy.rng_seed,
                                   salt + i);
          score.ok = true;
          score.proxy_violations = results[i].violations;
          score.early_stopped = results[i].early_stopped;
        } catch (const Error& err) {
          score.ok = false;
          score.error = err.what();
        }
      }
    });
    salt += batch.size();

    // Cache updates and tells land in batch order, one batch at a time.
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (scores[i].ok) cache.record_violations(results[i].violated_edges);
      family.tell(batch[i], scores[i]);
      out.history.push_back(SearchOutcome::HistoryEntry{
          serialize_potential_spec(batch[i].spec), batch[i].provenance, batch[i].stage,
          scores[i].proxy_violations, scores[i].early_stopped, !scores[i].ok});
      ++out.proxy_evaluations;
    }
  }

  // Exact evaluation of the finalists; the seed always competes, so the
  // outcome can never regress below it.
  std::vector<PotentialSpec> finals = family.final_candidates();
  finals.push_back(seed);
  std::vector<ExactScore> exact;
  std::set<std::string> seen;
  for (const PotentialSpec& spec : finals) {
    std::string serialized = serialize_potential_spec(spec);
    if (!seen.insert(serialized).second) continue;
    ExactScore es;
    es.spec = spec;
    es.serialized = std::move(serialized);
    try {
      es.potential = compile_potential(graph.instance_ptr(), spec);
      es.values = node_values(graph, *es.potential);
      es.stats = violations_k(graph, es.values, c);
    } catch (const Error&) {
      continue;  // malformed finalist; the seed is always well-formed
    }
    ++out.exact_evaluations;
    exact.push_back(std::move(es));
  }
  if (exact.empty()) throw ValidationError("search produced no evaluable candidate");

  const ExactScore* best = &exact.front();
  for (const ExactScore& es : exact) {
    auto key = [](const ExactScore& s) {
      return std::make_tuple(s.stats.count, s.stats.l1, s.stats.l2, std::cref(s.serialized));
    };
    if (key(es) < key(*best)) best = &es;
  }

  out.best = best->spec;
  out.best_report = evaluate_report(graph, *best->potential, best->values, c);
  out.wall_seconds = elapsed();
  return out;
}

std::vector<Candidate> NaiveFamily::ask(std::size_t) {
  if (asked_) return {};
  asked_ = true;
  return {Candidate{seed_, "seed", Stage::Quick}};
}

// ---------------------------------------------------------------------------
// Coefficient hill climb
// ---------------------------------------------------------------------------

CoefficientLocalFamily::CoefficientLocalFamily(CanonicalSpec seed,
                                               std::vector<std::int64_t> step_magnitudes,
                                               std::size_t final_count)
    : base_(std::move(seed)), magnitudes_(std::move(step_magnitudes)),
      final_count_(final_count) {
  validate_spec(base_);
  if (magnitudes_.empty()) throw SearchConfigError("empty mutation set");
  best_coefs_ = base_.coefs;
  queue_.push_back(make_candidate(base_.coefs, "seed"));
}

Candidate CoefficientLocalFamily::make_candidate(std::vector<std::int64_t> coefs,
                                                 const std::string& provenance) {
  CanonicalSpec spec = base_;
  spec.coefs = std::move(coefs);
  PotentialSpec ps;
  ps.body = std::move(spec);
  ps.name = "coef-local";
  return Candidate{std::move(ps), provenance, Stage::Quick};
}

void CoefficientLocalFamily::refill_queue() {
  const std::int64_t mag = magnitudes_[magnitude_idx_];
  for (std::size_t slot = 0; slot < base_.coefs.size(); ++slot) {
    for (int sign : {+1, -1}) {
      std::vector<std::int64_t> coefs = best_coefs_;
      coefs[slot] += sign * mag;
      CanonicalSpec spec = base_;
      spec.coefs = coefs;
      PotentialSpec ps;
      ps.body = spec;
      std::string key = serialize_potential_spec(ps);
      if (seen_coefs_.contains(key)) continue;
      queue_.push_back(make_candidate(std::move(coefs),
                                      "step " + std::to_string(sign * mag) + " @" +
                                          std::to_string(slot)));
    }
  }
}

std::vector<Candidate> CoefficientLocalFamily::ask(std::size_t max_batch) {
  while (queue_.empty() && outstanding_ == 0 && best_score_) {
    if (improved_this_round_) {
      magnitude_idx_ = 0;
    } else if (++magnitude_idx_ >= magnitudes_.size()) {
      return {};  // converged at the largest step size
    }
    improved_this_round_ = false;
    refill_queue();  // may stay empty when every neighbor was already seen
  }
  if (queue_.empty()) return {};
  std::vector<Candidate> batch;
  while (!queue_.empty() && batch.size() < max_batch) {
    batch.push_back(std::move(queue_.front()));
    queue_.erase(queue_.begin());
  }
  outstanding_ += batch.size();
  return batch;
}

void CoefficientLocalFamily::tell(const Candidate& candidate, const CandidateScore& score) {
  if (outstanding_ > 0) --outstanding_;
  if (!score.ok) return;
  const std::string key = serialize_potential_spec(candidate.spec);
  seen_.emplace_back(score.proxy_violations, key);
  seen_coefs_.emplace(key, candidate.spec.canonical().coefs);
  if (!best_score_ || score.proxy_violations < *best_score_) {
    best_score_ = score.proxy_violations;
    best_coefs_ = candidate.spec.canonical().coefs;
    improved_this_round_ = true;
  }
}

std::vector<PotentialSpec> CoefficientLocalFamily::final_candidates() const {
  std::vector<std::pair<std::uint64_t, std::string>> ranked = seen_;
  std::sort(ranked.begin(), ranked.end());
  ranked.erase(std::unique(ranked.begin(), ranked.end()), ranked.end());
  std::vector<PotentialSpec> out;
  for (const auto& [score, key] : ranked) {
    if (out.size() >= final_count_) break;
    CanonicalSpec spec = base_;
    spec.coefs = seen_coefs_.at(key);
    PotentialSpec ps;
    ps.body = std::move(spec);
    ps.name = "coef-local";
    out.push_back(std::move(ps));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Staged quick/confirm coefficient search
// ---------------------------------------------------------------------------

StagedCoefficientFamily::StagedCoefficientFamily(CanonicalSpec seed, StagedConfig config)
    : base_(std::move(seed)), config_(std::move(config)) {
  validate_spec(base_);
  if (!config_.exhaustive_range && config_.jump_magnitudes.empty())
    throw SearchConfigError("empty mutation set");
  if (config_.frozen_point &&
      (*config_.frozen_point < 1 || *config_.frozen_point > base_.n))
    throw SearchConfigError("frozen auxiliary index out of range");
  best_confirm_coefs_ = base_.coefs;
  seed_queue();
}

bool StagedCoefficientFamily::slot_frozen(int slot) const {
  if (!config_.frozen_point) return false;
  const auto pairs = pair_list(base_.n);
  return pairs[slot].first == *config_.frozen_point ||
         pairs[slot].second == *config_.frozen_point;
}

Candidate StagedCoefficientFamily::make_candidate(std::vector<std::int64_t> coefs,
                                                  Stage stage,
                                                  const std::string& provenance) {
  CanonicalSpec spec = base_;
  spec.coefs = std::move(coefs);
  PotentialSpec ps;
  ps.body = std::move(spec);
  ps.name = "staged";
  return Candidate{std::move(ps), provenance, stage};
}

void StagedCoefficientFamily::seed_queue() {
  auto push_quick = [&](std::vector<std::int64_t> coefs, const std::string& provenance) {
    CanonicalSpec spec = base_;
    spec.coefs = coefs;
    PotentialSpec ps;
    ps.body = std::move(spec);
    const std::string key = serialize_potential_spec(ps);
    if (!known_.emplace(key, coefs).second) return;
    quick_queue_.push_back(make_candidate(std::move(coefs), Stage::Quick, provenance));
  };

  if (config_.exhaustive_range) {
    const auto [lo, hi] = *config_.exhaustive_range;
    if (lo > hi) throw SearchConfigError("exhaustive range is empty");
    // Odometer over the unfrozen slots; frozen slots keep the seed value.
    std::vector<std::size_t> free_slots;
    for (std::size_t s = 0; s < base_.coefs.size(); ++s)
      if (!slot_frozen(static_cast<int>(s))) free_slots.push_back(s);
    std::vector<std::int64_t> coefs = base_.coefs;
    for (std::size_t s : free_slots) coefs[s] = lo;
    for (;;) {
      push_quick(coefs, "sweep");
      std::size_t d = free_slots.size();
      while (d > 0) {
        std::size_t slot = free_slots[d - 1];
        if (coefs[slot] < hi) {
          ++coefs[slot];
          break;
        }
        coefs[slot] = lo;
        --d;
      }
      if (d == 0) break;
    }
    return;
  }

  push_quick(base_.coefs, "seed");
  // Sparse structured patterns; frozen slots keep their seed values.
  std::vector<std::int64_t> zero = base_.coefs;
  for (std::size_t s = 0; s < zero.size(); ++s)
    if (!slot_frozen(static_cast<int>(s))) zero[s] = 0;
  push_quick(zero, "zero");
  const std::int64_t mag = config_.jump_magnitudes.front();
  for (std::size_t s = 0; s < base_.coefs.size(); ++s) {
    if (slot_frozen(static_cast<int>(s))) continue;
    for (int sign : {+1, -1}) {
      std::vector<std::int64_t> sparse = zero;
      sparse[s] = sign * mag;
      push_quick(std::move(sparse), "sparse @" + std::to_string(s));
    }
  }
}

void StagedCoefficientFamily::expand_from(const std::vector<std::int64_t>& coefs,
                                          std::int64_t magnitude,
                                          const std::string& provenance) {
  for (std::size_t s = 0; s < coefs.size(); ++s) {
    if (slot_frozen(static_cast<int>(s))) continue;
    for (int sign : {+1, -1}) {
      std::vector<std::int64_t> next = coefs;
      next[s] += sign * magnitude;
      CanonicalSpec spec = base_;
      spec.coefs = next;
      PotentialSpec ps;
      ps.body = std::move(spec);
      const std::string key = serialize_potential_spec(ps);
      if (!known_.emplace(key, next).second) continue;
      quick_queue_.push_back(make_candidate(
          std::move(next), Stage::Quick,
          provenance + " step " + std::to_string(sign * magnitude) + " @" +
              std::to_string(s)));
    }
  }
}

std::vector<Candidate> StagedCoefficientFamily::ask(std::size_t max_batch) {
  while (quick_queue_.empty() && confirm_queue_.empty() && !config_.exhaustive_range) {
    if (best_changed_) {
      magnitude_idx_ = 0;
      best_changed_ = false;
    } else if (++magnitude_idx_ >= config_.jump_magnitudes.size()) {
      return {};
    }
    // may produce nothing when this neighborhood was already explored
    expand_from(best_confirm_coefs_, config_.jump_magnitudes[magnitude_idx_], "mutate");
  }
  std::vector<Candidate> batch;
  while (!confirm_queue_.empty() && batch.size() < max_batch) {
    batch.push_back(std::move(confirm_queue_.front()));
    confirm_queue_.erase(confirm_queue_.begin());
  }
  while (!quick_queue_.empty() && batch.size() < max_batch) {
    batch.push_back(std::move(quick_queue_.front()));
    quick_queue_.erase(quick_queue_.begin());
  }
  return batch;
}

void StagedCoefficientFamily::tell(const Candidate& candidate, const CandidateScore& score) {
  if (!score.ok) return;
  if (candidate.stage == Stage::Quick) {
    const bool promote =
        !best_confirm_ ||
        score.proxy_violations <=
            *best_confirm_ + static_cast<std::uint64_t>(config_.promote_slack);
    if (promote)
      confirm_queue_.push_back(make_candidate(candidate.spec.canonical().coefs,
                                              Stage::Confirm,
                                              candidate.provenance + "|confirm"));
    return;
  }
  confirmed_.emplace_back(score.proxy_violations,
                          serialize_potential_spec(candidate.spec));
  known_.emplace(confirmed_.back().second, candidate.spec.canonical().coefs);
  if (!best_confirm_ || score.proxy_violations < *best_confirm_) {
    best_confirm_ = score.proxy_violations;
    best_confirm_coefs_ = candidate.spec.canonical().coefs;
    best_changed_ = true;
  }
}

std::vector<PotentialSpec> StagedCoefficientFamily::final_candidates() const {
  std::vector<std::pair<std::uint64_t, std::string>> ranked = confirmed_;
  std::sort(ranked.begin(), ranked.end());
  ranked.erase(std::unique(ranked.begin(), ranked.end()), ranked.end());
  std::vector<PotentialSpec> out;
  for (const auto& [score, key] : ranked) {
    if (out.size() >= config_.final_count) break;
    CanonicalSpec spec = base_;
    spec.coefs = known_.at(key);
    PotentialSpec ps;
    ps.body = std::move(spec);
    ps.name = "staged";
    out.push_back(std::move(ps));
  }
  if (out.empty()) {
    PotentialSpec ps;
    ps.body = base_;
    ps.name = "staged";
    out.push_back(std::move(ps));
  }
  return out;
}

SearchOutcome staged_coefficient_search(const WorkFunctionGraph& graph, Ratio c,
                                        const CanonicalSpec& seed, const StagedConfig& stages,
                                        const ProxyConfig& proxy, const SearchBudget& budget) {
  StagedCoefficientFamily family(seed, stages);
  PotentialSpec seed_spec;
  seed_spec.body = seed;
  seed_spec.name = "staged-seed";
  return ask_tell_loop(graph, c, family, seed_spec, proxy, budget);
}

// ---------------------------------------------------------------------------
// Fixed-matrix exact evaluation
// ---------------------------------------------------------------------------

FixedMatrixEvaluator::FixedMatrixEvaluator(const WorkFunctionGraph& graph,
                                           const CanonicalSpec& matrix)
    : graph_(graph), base_(matrix) {
  validate_spec(base_);
  CanonicalSpec tabulated = base_;
  std::fill(tabulated.coefs.begin(), tabulated.coefs.end(), 0);
  CompiledCanonical compiled(graph.instance_ptr(), tabulated);
  assignments_ = compiled.assignment_count();
  pair_count_ = base_.coefs.size();

  const std::size_t nodes = graph.node_count();
  const std::size_t h = base_.index_matrix.size();
  const std::size_t part_bytes = nodes * assignments_ * sizeof(std::int32_t);
  if (part_bytes > (1ull << 30))
    throw CompileBudgetError("fixed-matrix table needs " + std::to_string(part_bytes) +
                             " bytes; instance too large for this fast path");

  parts_.resize(nodes * assignments_);
  const std::uint32_t* rows = compiled.row_indices().data();
  parallel_chunks(nodes, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t id = begin; id < end; ++id) {
      const auto wf = graph.node(static_cast<std::uint32_t>(id));
      std::int32_t* out = parts_.data() + id * assignments_;
      for (std::size_t a = 0; a < assignments_; ++a) {
        std::int32_t sum = 0;
        for (std::size_t i = 0; i < h; ++i) sum += wf[rows[a * h + i]];
        out[a] = sum;
      }
    }
  });

  pair_dists_.resize(assignments_ * pair_count_);
  const Instance& inst = graph.instance();
  const auto pairs = pair_list(base_.n);
  std::vector<int> points(base_.n);
  for (std::size_t a = 0; a < assignments_; ++a) {
    std::size_t rem = a;
    for (int i = base_.n - 1; i >= 0; --i) {
      points[i] = static_cast<int>(rem % inst.m());
      rem /= inst.m();
    }
    for (std::size_t s = 0; s < pair_count_; ++s)
      pair_dists_[a * pair_count_ + s] = static_cast<std::int32_t>(
          inst.space().dist(points[pairs[s].first - 1], points[pairs[s].second - 1]));
  }
}

void FixedMatrixEvaluator::penalties_for(std::span<const std::int64_t> coefs,
                                         std::span<std::int64_t> out) const {
  assert(coefs.size() == pair_count_ && out.size() == assignments_);
  for (std::size_t a = 0; a < assignments_; ++a) {
    std::int64_t p = 0;
    const std::int32_t* d = pair_dists_.data() + a * pair_count_;
    for (std::size_t s = 0; s < pair_count_; ++s) p += coefs[s] * d[s];
    out[a] = p;
  }
}

std::int64_t FixedMatrixEvaluator::node_value(std::uint32_t id,
                                              std::span<const std::int64_t> penalties) const {
  const std::int32_t* part = parts_.data() + static_cast<std::size_t>(id) * assignments_;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::size_t a = 0; a < assignments_; ++a) {
    const std::int64_t v = static_cast<std::int64_t>(part[a]) - penalties[a];
    if (v < best) best = v;
  }
  return best;
}

ViolationStats FixedMatrixEvaluator::exact_violations(Ratio c,
                                                      std::span<const std::int64_t> coefs) const {
  std::vector<std::int64_t> penalties(assignments_);
  penalties_for(coefs, penalties);

  NodeValues values;
  values.integer_valued = true;
  values.values.resize(graph_.node_count());
  parallel_chunks(graph_.node_count(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t id = begin; id < end; ++id)
      values.values[id] =
          static_cast<double>(node_value(static_cast<std::uint32_t>(id), penalties));
  });
  return violations_k(graph_, values, c);
}

std::string outcome_to_json(const SearchOutcome& outcome, const WorkFunctionGraph& graph) {
  nlohmann::json j;
  j["best"] = nlohmann::json::parse(serialize_potential_spec(outcome.best));
  j["report"] = nlohmann::json::parse(report_to_json(outcome.best_report, graph));
  auto history = nlohmann::json::array();
  for (const auto& h : outcome.history) {
    history.push_back({{"spec", nlohmann::json::parse(h.spec)},
                       {"provenance", h.provenance},
                       {"stage", stage_name(h.stage)},
                       {"proxy_violations", h.proxy_violations},
                       {"early_stopped", h.early_stopped},
                       {"error", h.error}});
  }
  j["history"] = std::move(history);
  j["budget_used"] = {{"proxy_evaluations", outcome.proxy_evaluations},
                      {"exact_evaluations", outcome.exact_evaluations},
                      {"wall_seconds", outcome.wall_seconds}};
  return j.dump(2);
}

}  // namespace wfbench
