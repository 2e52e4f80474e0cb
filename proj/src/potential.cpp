#include "wfbench/potential.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace wfbench {

namespace {

int pair_slot(int i, int j, int n) {
  // row-major upper triangle, 1-based i < j
  assert(1 <= i && i < j && j <= n);
  int slot = 0;
  for (int a = 1; a < i; ++a) slot += n - a;
  return slot + (j - i - 1);
}

}  // namespace

std::int64_t CanonicalSpec::coef(int i, int j) const {
  if (i > j) std::swap(i, j);
  return coefs[pair_slot(i, j, n)];
}

void validate_spec(const CanonicalSpec& spec) {
  if (spec.n < 1) throw ValidationError("canonical spec needs n >= 1");
  if (spec.index_matrix.empty()) throw ValidationError("canonical spec needs at least one row");
  const std::size_t width = spec.index_matrix.front().size();
  if (width == 0) throw ValidationError("canonical spec has an empty row");
  for (const auto& row : spec.index_matrix) {
    if (row.size() != width) throw ValidationError("index matrix rows have unequal length");
    for (int e : row) {
      if (e == 0) throw ValidationError("index matrix entries must be nonzero");
      if (std::abs(e) > spec.n)
        throw ValidationError("index matrix entry " + std::to_string(e) +
                              " exceeds auxiliary point count n=" + std::to_string(spec.n));
    }
  }
  const std::size_t expected = static_cast<std::size_t>(spec.n) * (spec.n - 1) / 2;
  if (spec.coefs.size() != expected)
    throw ValidationError("coefficient vector must have length C(n,2) = " +
                          std::to_string(expected) + ", got " +
                          std::to_string(spec.coefs.size()));
}

bool is_restricted_form(const CanonicalSpec& spec) {
  bool has_all_neg1 = false;
  for (const auto& row : spec.index_matrix) {
    const bool all_neg1 = std::all_of(row.begin(), row.end(), [](int e) { return e == -1; });
    if (all_neg1) {
      has_all_neg1 = true;
      continue;
    }
    if (std::find(row.begin(), row.end(), 1) == row.end()) return false;
  }
  if (!has_all_neg1) return false;
  for (int j = 2; j <= spec.n; ++j)
    if (spec.coef(1, j) != 0) return false;
  return true;
}

PotentialSpec builtin_potential(const std::string& name, int k) {
  PotentialSpec out;
  out.name = name;
  if (name == "sum") {
    out.body = SumSpec{};
    return out;
  }
  if (name == "unifying") {
    if (k < 1) throw ValidationError("unifying potential needs k >= 1");
    CanonicalSpec spec;
    spec.n = k;
    spec.index_matrix.assign(k + 1, std::vector<int>(k));
    for (int j = 0; j < k; ++j) spec.index_matrix[0][j] = j + 1;
    for (int i = 1; i <= k; ++i)
      for (int j = 0; j < k; ++j) spec.index_matrix[i][j] = (j + 1 <= i) ? -i : j + 1;
    spec.coefs.assign(static_cast<std::size_t>(k) * (k - 1) / 2, 0);
    out.body = std::move(spec);
    return out;
  }
  if (name == "huang-zhang-k3") {
    CanonicalSpec spec;
    spec.n = 4;
    spec.index_matrix = {{-1, -1, -1}, {1, 2, -3}, {1, 3, -4}, {1, 4, -2}};
    // pairs (1,2)(1,3)(1,4)(2,3)(2,4)(3,4)
    spec.coefs = {0, 0, 0, 1, 1, 1};
    out.body = std::move(spec);
    return out;
  }
  if (name == "codex-k4-kcomp") {
    CanonicalSpec spec;
    spec.n = 5;
    spec.index_matrix = {
        {-5, -5, -5, -5}, {5, -1, -2, -2}, {5, 1, 3, 4}, {5, 2, -4, -4}, {5, 2, 4, -3}};
    // pairs (1,2)(1,3)(1,4)(1,5)(2,3)(2,4)(2,5)(3,4)(3,5)(4,5)
    spec.coefs = {-1, 0, -1, 0, 1, 0, 0, -1, 0, 0};
    out.body = std::move(spec);
    return out;
  }
  if (name == "codex-k4-k1comp") {
    CanonicalSpec spec;
    spec.n = 4;
    spec.index_matrix = {{1, 2, 3, 4},    {1, 2, 3, 4},     {-1, 2, 3, 4},
                         {-2, -2, 3, 4},  {-3, -3, -3, 4},  {-4, -4, -4, -4}};
    spec.coefs.assign(6, 0);
    out.body = std::move(spec);
    return out;
  }
  if (name == "shinka-unifying-k4") {
    CanonicalSpec spec;
    spec.n = 5;
    spec.index_matrix = {
        {1, 2, 3, 4}, {-1, 2, 3, 4}, {-2, -2, 3, 4}, {-3, -3, -3, 4}, {-4, -4, -4, -4}};
    // pairs (1,2)(1,3)(1,4)(1,5)(2,3)(2,4)(2,5)(3,4)(3,5)(4,5)
    spec.coefs = {1, -1, -1, -1, -1, -1, -1, 1, 1, 1};
    out.body = std::move(spec);
    return out;
  }
  throw ValidationError("unknown builtin potential: " + name);
}

std::vector<std::string> builtin_names() {
  return {"unifying", "huang-zhang-k3", "codex-k4-kcomp", "codex-k4-k1comp",
          "shinka-unifying-k4", "sum"};
}

PotentialSpec parse_potential_spec(const std::string& json_text, int k) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "builtin") return builtin_potential(j.at("name").get<std::string>(), k);
  PotentialSpec out;
  if (kind == "canonical") {
    CanonicalSpec spec;
    spec.n = j.at("n").get<int>();
    spec.index_matrix = j.at("index_matrix").get<std::vector<std::vector<int>>>();
    spec.coefs = j.at("coefs").get<std::vector<std::int64_t>>();
    validate_spec(spec);
    out.body = std::move(spec);
    out.name = "canonical";
    return out;
  }
  if (kind == "external") {
    ExternalSpec spec;
    spec.cmd = j.at("cmd").get<std::vector<std::string>>();
    if (spec.cmd.empty()) throw ValidationError("external spec needs a command");
    if (j.contains("timeout_ms")) spec.timeout_ms = j.at("timeout_ms").get<int>();
    out.body = std::move(spec);
    out.name = "external";
    return out;
  }
  throw ValidationError("unknown potential kind: " + kind);
}

PotentialSpec load_potential_spec_file(const std::string& path, int k) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open potential file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_potential_spec(ss.str(), k);
}

std::string serialize_potential_spec(const PotentialSpec& spec) {
  nlohmann::json j;
  if (const auto* c = std::get_if<CanonicalSpec>(&spec.body)) {
    j["kind"] = "canonical";
    j["n"] = c->n;
    j["index_matrix"] = c->index_matrix;
    j["coefs"] = c->coefs;
  } else if (std::holds_alternative<SumSpec>(spec.body)) {
    j["kind"] = "builtin";
    j["name"] = "sum";
  } else {
    const auto& e = std::get<ExternalSpec>(spec.body);
    j["kind"] = "external";
    j["cmd"] = e.cmd;
    j["timeout_ms"] = e.timeout_ms;
  }
  return j.dump();
}

double Potential::value_shifted(std::span<const std::int32_t> wf, std::int64_t shift) const {
  if (auto slope = shift_slope())
    return value(wf) + static_cast<double>(*slope) * static_cast<double>(shift);
  std::vector<std::int32_t> shifted(wf.begin(), wf.end());
  for (auto& v : shifted) v = static_cast<std::int32_t>(v + shift);
  return value(shifted);
}

CompiledCanonical::CompiledCanonical(std::shared_ptr<const Instance> instance,
                                     CanonicalSpec spec, const CompileOptions& options)
    : instance_(std::move(instance)), spec_(std::move(spec)) {
  validate_spec(spec_);
  const Instance& inst = *instance_;
  if (static_cast<int>(spec_.index_matrix.front().size()) != inst.k())
    throw ValidationError("index matrix width " +
                          std::to_string(spec_.index_matrix.front().size()) +
                          " does not match server count k=" + std::to_string(inst.k()));
  bool needs_antipode = false;
  for (const auto& row : spec_.index_matrix)
    for (int e : row)
      if (e < 0) needs_antipode = true;
  if (needs_antipode && !inst.space().has_antipode())
    throw ValidationError("index matrix uses antipodes but the metric has none");

  const std::size_t m = static_cast<std::size_t>(inst.m());
  assignments_ = 1;
  for (int i = 0; i < spec_.n; ++i) {
    if (assignments_ > std::numeric_limits<std::size_t>::max() / m)
      throw CompileBudgetError("assignment table overflows the address space");
    assignments_ *= m;
  }

  const std::size_t h = static_cast<std::size_t>(spec_.rows());
  const std::size_t table_bytes =
      assignments_ * (h * sizeof(std::uint32_t) + sizeof(std::int64_t));
  if (options.streaming) {
    streaming_ = true;
    return;
  }
  if (table_bytes > options.table_budget_bytes)
    throw CompileBudgetError(
        "assignment table needs " + std::to_string(table_bytes) +
        " bytes, over the budget of " + std::to_string(options.table_budget_bytes) +
        "; use the streaming evaluation mode");

  row_indices_.resize(assignments_ * h);
  penalties_.resize(assignments_);
  std::vector<int> points(spec_.n);
  std::vector<std::uint32_t> rows(h);
  for (std::size_t a = 0; a < assignments_; ++a) {
    decode_assignment(a, points);
    assignment_rows_impl(a, points, rows);
    std::copy(rows.begin(), rows.end(), row_indices_.begin() + a * h);
    penalties_[a] = penalty_impl(points);
  }
}

void CompiledCanonical::decode_assignment(std::size_t a, std::span<int> points) const {
  const std::size_t m = static_cast<std::size_t>(instance_->m());
  // odometer order: a_n is the fastest digit
  for (int i = spec_.n - 1; i >= 0; --i) {
    points[i] = static_cast<int>(a % m);
    a /= m;
  }
}

std::int64_t CompiledCanonical::penalty_impl(std::span<const int> points) const {
  const MetricSpace& space = instance_->space();
  std::int64_t p = 0;
  int slot = 0;
  for (int i = 1; i <= spec_.n; ++i)
    for (int j = i + 1; j <= spec_.n; ++j, ++slot)
      if (spec_.coefs[slot] != 0)
        p += spec_.coefs[slot] * space.dist(points[i - 1], points[j - 1]);
  return p;
}

void CompiledCanonical::assignment_rows_impl(std::size_t, std::span<const int> points,
                                             std::span<std::uint32_t> out) const {
  const Instance& inst = *instance_;
  const int k = inst.k();
  std::vector<int> cfg(k);
  for (std::size_t row = 0; row < spec_.index_matrix.size(); ++row) {
    for (int j = 0; j < k; ++j) {
      const int e = spec_.index_matrix[row][j];
      cfg[j] = e > 0 ? points[e - 1] : inst.space().antipode(points[-e - 1]);
    }
    out[row] = inst.indexer().to_index(Configuration(cfg));
  }
}

std::int64_t CompiledCanonical::assignment_penalty(std::size_t a) const {
  if (!streaming_) return penalties_[a];
  std::vector<int> points(spec_.n);
  decode_assignment(a, points);
  return penalty_impl(points);
}

std::int64_t CompiledCanonical::evaluate(std::span<const std::int32_t> wf) const {
  if (wf.size() != instance_->config_count())
    throw EvaluationContextError("work function length does not match the compiled instance");
  const std::size_t h = spec_.index_matrix.size();
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  if (!streaming_) {
    const std::uint32_t* rows = row_indices_.data();
    for (std::size_t a = 0; a < assignments_; ++a) {
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < h; ++i) sum += wf[rows[a * h + i]];
      sum -= penalties_[a];
      if (sum < best) best = sum;
    }
    return best;
  }
  std::vector<std::uint32_t> rows(h);
  std::vector<int> points(spec_.n);
  for (std::size_t a = 0; a < assignments_; ++a) {
    decode_assignment(a, points);
    assignment_rows_impl(a, points, rows);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < h; ++i) sum += wf[rows[i]];
    sum -= penalty_impl(points);
    if (sum < best) best = sum;
  }
  return best;
}

double SumPotential::value(std::span<const std::int32_t> wf) const {
  if (wf.size() != instance_->config_count())
    throw EvaluationContextError("work function length does not match the instance");
  std::int64_t sum = 0;
  for (std::int32_t v : wf) sum += v;
  return static_cast<double>(sum);
}

// ---------------------------------------------------------------------------
// External bridge
// ---------------------------------------------------------------------------

struct ExternalPotential::Impl {
  ExternalSpec spec;
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string read_buf;
  std::int64_t next_id = 0;
  std::int64_t last_ack = -1;
  mutable std::mutex mutex;

  ~Impl() {
    if (to_child >= 0) close(to_child);
    if (from_child >= 0) close(from_child);
    if (pid > 0) {
      kill(pid, SIGTERM);
      waitpid(pid, nullptr, 0);
    }
  }

  void spawn() {
    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
      throw ExternalProcessError("cannot create pipes for external potential", -1);
    pid = fork();
    if (pid < 0) throw ExternalProcessError("fork failed", -1);
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      std::vector<char*> argv;
      argv.reserve(spec.cmd.size() + 1);
      for (const auto& a : spec.cmd) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child = in_pipe[1];
    from_child = out_pipe[0];
  }

  void send_line(const std::string& line) {
    std::string payload = line;
    payload.push_back('\n');
    std::size_t off = 0;
    while (off < payload.size()) {
      ssize_t n = write(to_child, payload.data() + off, payload.size() - off);
      if (n <= 0) throw ExternalProcessError("external potential closed its input", last_ack);
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::milliseconds(spec.timeout_ms);
    for (;;) {
      auto nl = read_buf.find('\n');
      if (nl != std::string::npos) {
        std::string line = read_buf.substr(0, nl);
        read_buf.erase(0, nl + 1);
        return line;
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - clock::now());
      if (remaining.count() <= 0)
        throw ExternalTimeoutError("external potential timed out after " +
                                       std::to_string(spec.timeout_ms) + " ms",
                                   last_ack);
      pollfd pfd{from_child, POLLIN, 0};
      int rc = poll(&pfd, 1, static_cast<int>(remaining.count()));
      if (rc <= 0) continue;
      char chunk[4096];
      ssize_t n = read(from_child, chunk, sizeof chunk);
      if (n == 0)
        throw ExternalProcessError("external potential exited mid-stream", last_ack);
      if (n < 0) throw ExternalProcessError("read from external potential failed", last_ack);
      read_buf.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

ExternalPotential::ExternalPotential(std::shared_ptr<const Instance> instance,
                                     ExternalSpec spec)
    : impl_(std::make_unique<Impl>()) {
  impl_->spec = std::move(spec);
  impl_->spawn();
  const Instance& inst = *instance;
  nlohmann::json hello;
  hello["k"] = inst.k();
  hello["m"] = inst.m();
  auto dist = nlohmann::json::array();
  for (int i = 0; i < inst.m(); ++i) {
    auto row = nlohmann::json::array();
    for (int j = 0; j < inst.m(); ++j) row.push_back(inst.space().dist(i, j));
    dist.push_back(std::move(row));
  }
  hello["dist"] = std::move(dist);
  hello["config_count"] = inst.config_count();
  impl_->send_line(hello.dump());
}

ExternalPotential::~ExternalPotential() = default;

std::int64_t ExternalPotential::last_acknowledged() const { return impl_->last_ack; }

double ExternalPotential::value(std::span<const std::int32_t> wf) const {
  std::lock_guard lock(impl_->mutex);
  const std::int64_t id = impl_->next_id++;
  nlohmann::json req;
  req["id"] = id;
  req["wf"] = std::vector<std::int32_t>(wf.begin(), wf.end());
  impl_->send_line(req.dump());
  const std::string line = impl_->read_line();
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ExternalProtocolError("malformed reply from external potential: " + line,
                                impl_->last_ack);
  }
  if (!reply.contains("id") || !reply.contains("phi") ||
      reply.at("id").get<std::int64_t>() != id)
    throw ExternalProtocolError("reply out of order or missing fields: " + line,
                                impl_->last_ack);
  impl_->last_ack = id;
  return reply.at("phi").get<double>();
}

std::unique_ptr<Potential> compile_potential(std::shared_ptr<const Instance> instance,
                                             const PotentialSpec& spec,
                                             const CompileOptions& options) {
  if (const auto* c = std::get_if<CanonicalSpec>(&spec.body))
    return std::make_unique<CompiledCanonical>(std::move(instance), *c, options);
  if (std::holds_alternative<SumSpec>(spec.body))
    return std::make_unique<SumPotential>(std::move(instance));
  return std::make_unique<ExternalPotential>(std::move(instance),
                                             std::get<ExternalSpec>(spec.body));
}

}  // namespace wfbench
