#include "wfbench/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfbench/feasibility.hpp"
#include "wfbench/graph.hpp"
#include "wfbench/metrics.hpp"
#include "wfbench/potential.hpp"
#include "wfbench/search.hpp"

namespace wfbench::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Preset {
  int k;
  int m;
};

const std::unordered_map<std::string, Preset> kPresets = {
    {"circle-k3-m6", {3, 6}},
    {"circle-k3-m8", {3, 8}},
    {"circle-k4-m6", {4, 6}},
    {"circle-k4-m8", {4, 8}},
};

Ratio parse_ratio(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Ratio(std::stoll(text));
    return Ratio(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ValidationError("cannot parse ratio: " + text);
  }
}

Configuration parse_start(const std::string& text, int k) {
  std::vector<int> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) pts.push_back(std::stoi(item));
  if (static_cast<int>(pts.size()) != k)
    throw ValidationError("start configuration needs exactly k points");
  return Configuration(std::move(pts));
}

PotentialSpec resolve_potential(const std::string& arg, int k) {
  constexpr std::string_view prefix = "builtin:";
  if (arg.starts_with(prefix)) return builtin_potential(arg.substr(prefix.size()), k);
  return load_potential_spec_file(arg, k);
}

std::string fmt_opt(const std::optional<double>& v, const char* undefined_label) {
  if (!v) return undefined_label;
  std::ostringstream os;
  os << *v;
  return os.str();
}

void print_report(const EvaluationReport& rep, std::ostream& out) {
  out << "c                        " << rep.c.to_string() << "\n"
      << "edges_total              " << rep.edges_total << "\n"
      << "violations_k             " << rep.violations_k << "\n"
      << "violations_k_l1          " << rep.violations_k_l1 << "\n"
      << "violations_k_l2          " << rep.violations_k_l2 << "\n"
      << "violations_k_linf        " << rep.violations_k_linf << "\n"
      << "violations_dmin_0        " << rep.violations_dmin_0 << "\n"
      << "detected_dmin_0_score    " << fmt_opt(rep.detected_dmin_0_score, "undefined (no hard edges)")
      << "\n"
      << "violations_renorm        " << rep.violations_renorm << "\n"
      << "strong_hypothesis_rho    " << fmt_opt(rep.strong_hypothesis_rho, "no constraining edges")
      << "\n"
      << "opt_upper_bound          " << rep.opt_upper_bound
      << (rep.opt_upper_bound_nonlinear ? " (nonlinear)" : "") << "\n"
      << "bellman_node_r2          " << fmt_opt(rep.bellman_node_r2, "-") << "\n"
      << "bellman_node_corr        " << fmt_opt(rep.bellman_node_corr, "-") << "\n"
      << "bellman_edge_r2          " << fmt_opt(rep.bellman_edge_r2, "-") << "\n"
      << "bellman_edge_corr        " << fmt_opt(rep.bellman_edge_corr, "-") << "\n"
      << "score                    " << std::setprecision(12) << rep.score << "\n"
      << "violations by weight sign  +" << rep.violations_weight_pos << " 0"
      << rep.violations_weight_zero << " -" << rep.violations_weight_neg << "\n";
  for (const auto& flag : rep.flags) out << "flag: " << flag << "\n";
}

struct GenerateArgs {
  std::string preset;
  int k = 0;
  int m = 0;
  std::string metric_file;
  std::string out;
  std::string start;
  bool symmetry = false;
  bool no_self_loops = false;
  bool all_starts = false;
  bool single_start = false;
  bool probabilistic = false;
  std::uint64_t bloom_bits = 1ull << 26;
  std::uint64_t node_cap = 100'000'000;
};

int cmd_generate(const GenerateArgs& args) {
  std::shared_ptr<const Instance> instance;
  bool preset_used = false;
  if (!args.metric_file.empty()) {
    instance = load_instance_file(args.metric_file);
  } else {
    int k = args.k, m = args.m;
    if (!args.preset.empty()) {
      auto it = kPresets.find(args.preset);
      if (it == kPresets.end()) throw ValidationError("unknown preset: " + args.preset);
      k = it->second.k;
      m = it->second.m;
      preset_used = true;
    }
    if (k <= 0 || m <= 0) throw ValidationError("generate needs --preset, --metric or --k/--m");
    instance = std::make_shared<Instance>(MetricSpace::circle(m), k);
  }

  Configuration c0 = args.start.empty()
                         ? Configuration(std::vector<int>(instance->k(), 0))
                         : parse_start(args.start, instance->k());
  BuildOptions options;
  options.self_loops = !args.no_self_loops;
  options.symmetry_dedup = args.symmetry;
  options.probabilistic_visited = args.probabilistic;
  // Presets are the shipped instances, which enumerate from every start
  // configuration; --single-start overrides for experiments.
  options.all_starts = (preset_used || args.all_starts) && !args.single_start;
  options.bloom_bits = args.bloom_bits;
  options.node_cap = args.node_cap;

  WorkFunctionGraph graph = build_graph(instance, c0, options);
  save_graph(graph, args.out);
  std::cout << "nodes " << graph.node_count() << "\nedges " << graph.edges().size() << "\n";
  if (graph.flags().probabilistic_visited)
    std::cout << "note: probabilistic visited set; counts are lower bounds ("
              << graph.unresolved_edges() << " unresolved edges)\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string graph;
  std::string potential;
  std::string c;
  std::string report_path;
  bool with_bellman = false;
  bool require_perfect = false;
  bool require_restricted = false;
};

int cmd_evaluate(const EvaluateArgs& args) {
  WorkFunctionGraph graph = load_graph(args.graph);
  const Ratio c = args.c.empty() ? Ratio(graph.instance().k()) : parse_ratio(args.c);
  PotentialSpec spec = resolve_potential(args.potential, graph.instance().k());
  if (args.require_restricted) {
    if (!spec.is_canonical() || !is_restricted_form(spec.canonical()))
      throw ValidationError("potential is not in the restricted canonical form");
  }
  auto potential = compile_potential(graph.instance_ptr(), spec);
  NodeValues values = node_values(graph, *potential);

  std::optional<BellmanCertificate> cert;
  if (args.with_bellman) cert = certify(graph, c);
  EvaluationReport rep =
      evaluate_report(graph, *potential, values, c, cert ? &*cert : nullptr);

  print_report(rep, std::cout);
  if (graph.flags().probabilistic_visited)
    std::cout << "note: probabilistic visited set; counts are lower bounds\n";
  if (!args.report_path.empty()) {
    std::ofstream out(args.report_path);
    if (!out) throw IoError("cannot write report: " + args.report_path);
    out << report_to_json(rep, graph) << "\n";
  }
  if (args.require_perfect && rep.violations_k > 0) return kExitCheckFailed;
  return kExitOk;
}

struct CertifyArgs {
  std::string graph;
  std::string c;
  std::string psi_path;
};

int cmd_certify(const CertifyArgs& args) {
  WorkFunctionGraph graph = load_graph(args.graph);
  const Ratio c = args.c.empty() ? Ratio(graph.instance().k()) : parse_ratio(args.c);
  BellmanCertificate cert = certify(graph, c);
  if (!cert.feasible) {
    std::cout << "infeasible at c = " << c.to_string() << "; negative cycle of "
              << cert.cycle.size() << " edges:\n";
    std::int64_t total = 0;
    for (std::uint32_t eid : cert.cycle) {
      const WFEdge& e = graph.edges()[eid];
      total += edge_weight_scaled(e, c);
      std::cout << "  edge " << eid << ": " << e.u << " -r" << e.r << "-> " << e.v
                << " grad=" << e.grad << " dopt=" << e.dopt << "\n";
    }
    std::cout << "required increase around the cycle (x" << c.den << "): " << total << "\n";
    return kExitCheckFailed;
  }
  const std::uint64_t bad = verify_certificate(graph, cert);
  std::cout << "feasible at c = " << c.to_string() << "; re-verified violations: " << bad
            << "\n";
  if (!args.psi_path.empty()) {
    nlohmann::json j;
    j["c"] = c.to_string();
    j["scale"] = c.den;
    j["psi"] = cert.psi;
    std::ofstream out(args.psi_path);
    if (!out) throw IoError("cannot write psi: " + args.psi_path);
    out << j.dump(2) << "\n";
  }
  return bad == 0 ? kExitOk : kExitCheckFailed;
}

struct SearchArgs {
  std::string graph;
  std::string c;
  std::string seed;
  std::string family = "staged";
  std::uint64_t budget_evals = 1000;
  double budget_secs = 0;
  std::uint64_t proxy_sample = 50'000;
  std::uint64_t confirm_sample = 200'000;
  std::size_t hard_cache = 4096;
  std::uint64_t early_stop = 32;
  std::uint64_t rng = 1234;
  std::string out;
  std::string jumps = "1,2,4";
  std::int64_t promote_slack = 2;
  int frozen_point = 0;
  std::string exhaustive;  // "lo:hi"
};

int cmd_search(const SearchArgs& args) {
  WorkFunctionGraph graph = load_graph(args.graph);
  const Ratio c = args.c.empty() ? Ratio(graph.instance().k()) : parse_ratio(args.c);
  PotentialSpec seed = resolve_potential(args.seed, graph.instance().k());

  ProxyConfig proxy;
  proxy.sample_size = args.proxy_sample;
  proxy.confirm_sample_size = args.confirm_sample;
  proxy.hard_cache_capacity = args.hard_cache;
  proxy.early_stop_violations = args.early_stop;
  proxy.rng_seed = args.rng;
  SearchBudget budget{args.budget_evals, args.budget_secs};

  auto parse_jumps = [&] {
    std::vector<std::int64_t> jumps;
    std::stringstream ss(args.jumps);
    std::string item;
    while (std::getline(ss, item, ',')) jumps.push_back(std::stoll(item));
    return jumps;
  };

  SearchOutcome outcome;
  if (args.family == "naive") {
    NaiveFamily family(seed);
    outcome = ask_tell_loop(graph, c, family, seed, proxy, budget);
  } else if (args.family == "coef-local") {
    if (!seed.is_canonical())
      throw SearchConfigError("coef-local search needs a canonical seed potential");
    CoefficientLocalFamily family(seed.canonical(), parse_jumps());
    outcome = ask_tell_loop(graph, c, family, seed, proxy, budget);
  } else if (args.family == "staged") {
    if (!seed.is_canonical())
      throw SearchConfigError("staged search needs a canonical seed potential");
    StagedConfig stages;
    stages.jump_magnitudes = parse_jumps();
    stages.promote_slack = args.promote_slack;
    if (args.frozen_point > 0) stages.frozen_point = args.frozen_point;
    if (!args.exhaustive.empty()) {
      const auto colon = args.exhaustive.find(':');
      if (colon == std::string::npos)
        throw SearchConfigError("--exhaustive needs the form lo:hi");
      stages.exhaustive_range = {std::stoll(args.exhaustive.substr(0, colon)),
                                 std::stoll(args.exhaustive.substr(colon + 1))};
    }
    outcome = staged_coefficient_search(graph, c, seed.canonical(), stages, proxy, budget);
  } else {
    throw SearchConfigError("unknown family: " + args.family);
  }

  std::cout << "proxy evaluations " << outcome.proxy_evaluations << ", exact "
            << outcome.exact_evaluations << ", wall " << outcome.wall_seconds << "s\n"
            << "best potential: " << serialize_potential_spec(outcome.best) << "\n";
  print_report(outcome.best_report, std::cout);
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw IoError("cannot write outcome: " + args.out);
    out << outcome_to_json(outcome, graph) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const std::string& graph_path) {
  WorkFunctionGraph graph = load_graph(graph_path);
  const Instance& inst = graph.instance();
  const bool symmetry = graph.flags().symmetry_dedup;

  std::unordered_map<std::string, std::uint32_t> by_vector;
  by_vector.reserve(graph.node_count());
  auto key_of = [&](std::span<const std::int32_t> v) {
    return std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(std::int32_t));
  };
  for (std::uint32_t id = 0; id < graph.node_count(); ++id)
    by_vector.emplace(key_of(graph.node(id)), id);

  std::uint64_t checked = 0;
  for (std::size_t eid = 0; eid < graph.edges().size(); ++eid) {
    const WFEdge& e = graph.edges()[eid];
    if (e.v == kUnresolvedNode) continue;
    WorkFunction wu = graph.node_work_function(e.u);
    UpdateResult res = update_with_costs(wu, e.r);
    auto norm = normalize(res.next);
    std::vector<std::int32_t> vec(norm.wf.values().begin(), norm.wf.values().end());
    if (symmetry) vec = canonicalize_node(inst, vec);
    auto it = by_vector.find(key_of(vec));
    const bool target_ok = it != by_vector.end() && it->second == e.v;
    if (!target_ok || res.grad != e.grad || res.dopt != e.dopt) {
      std::cout << "mismatch at edge " << eid << " (u=" << e.u << ", r=" << e.r
                << "): stored v=" << e.v << " grad=" << e.grad << " dopt=" << e.dopt
                << ", recomputed v="
                << (it == by_vector.end() ? std::string("<unknown node>")
                                          : std::to_string(it->second))
                << " grad=" << res.grad << " dopt=" << res.dopt << "\n";
      return kExitCheckFailed;
    }
    ++checked;
  }
  std::cout << "verified " << checked << " edges against recomputation\n";
  return kExitOk;
}

struct ReportArgs {
  std::string graph;
  std::string potential;
  std::string c;
  std::string csv;
};

int cmd_report(const ReportArgs& args) {
  WorkFunctionGraph graph = load_graph(args.graph);
  const Ratio c = args.c.empty() ? Ratio(graph.instance().k()) : parse_ratio(args.c);
  PotentialSpec spec = resolve_potential(args.potential, graph.instance().k());
  auto potential = compile_potential(graph.instance_ptr(), spec);
  NodeValues values = node_values(graph, *potential);
  if (args.csv.empty()) {
    write_shortfall_csv(graph, values, c, std::cout);
  } else {
    std::ofstream out(args.csv);
    if (!out) throw IoError("cannot write csv: " + args.csv);
    write_shortfall_csv(graph, values, c, out);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"work-function graph bench: generate / evaluate / certify / search / verify / report"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "enumerate a work-function graph");
  generate->add_option("--preset", gen.preset, "circle-k3-m6 | circle-k3-m8 | circle-k4-m6 | circle-k4-m8");
  generate->add_option("--k", gen.k, "server count");
  generate->add_option("--m", gen.m, "circle discretization size");
  generate->add_option("--metric", gen.metric_file, "metric definition JSON file");
  generate->add_option("--out", gen.out, "output graph file")->required();
  generate->add_option("--start", gen.start, "start configuration, e.g. 0,0,0");
  generate->add_flag("--symmetry", gen.symmetry, "dedup nodes by circle symmetry");
  generate->add_flag("--no-self-loops", gen.no_self_loops, "drop edges whose target equals the source");
  generate->add_flag("--all-starts", gen.all_starts,
                     "seed the closure with every start configuration (implied by --preset)");
  generate->add_flag("--single-start", gen.single_start,
                     "closure from C0 only, even with --preset");
  generate->add_flag("--probabilistic", gen.probabilistic, "Bloom-filter visited set (counts become lower bounds)");
  generate->add_option("--bloom-bits", gen.bloom_bits, "Bloom filter size in bits");
  generate->add_option("--node-cap", gen.node_cap, "abort enumeration beyond this many nodes");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "score a potential against a graph");
  evaluate->add_option("--graph", ev.graph, "graph file")->required();
  evaluate->add_option("--potential", ev.potential, "spec JSON file or builtin:<name>")->required();
  evaluate->add_option("--c", ev.c, "competitiveness ratio (default: k)");
  evaluate->add_option("--report", ev.report_path, "write the JSON report here");
  evaluate->add_flag("--with-bellman", ev.with_bellman, "include Bellman correlation metrics");
  evaluate->add_flag("--require-perfect", ev.require_perfect, "exit 1 unless violations_k = 0");
  evaluate->add_flag("--require-restricted-form", ev.require_restricted,
                     "reject potentials outside the restricted canonical form");

  CertifyArgs ce;
  auto* certify_cmd = app.add_subcommand("certify", "Bellman-Ford feasibility certificate");
  certify_cmd->add_option("--graph", ce.graph, "graph file")->required();
  certify_cmd->add_option("--c", ce.c, "competitiveness ratio (default: k)");
  certify_cmd->add_option("--emit-psi", ce.psi_path, "write the node potential JSON here");

  SearchArgs se;
  auto* search = app.add_subcommand("search", "proxy-guided potential search");
  search->add_option("--graph", se.graph, "graph file")->required();
  search->add_option("--c", se.c, "competitiveness ratio (default: k)");
  search->add_option("--seed-potential", se.seed, "spec JSON file or builtin:<name>")->required();
  search->add_option("--family", se.family, "naive | coef-local | staged");
  search->add_option("--budget-evals", se.budget_evals, "max proxy evaluations");
  search->add_option("--budget-secs", se.budget_secs, "wall-clock limit in seconds");
  search->add_option("--proxy-sample", se.proxy_sample, "edges per quick evaluation");
  search->add_option("--confirm-sample", se.confirm_sample, "edges per confirm evaluation");
  search->add_option("--hard-cache", se.hard_cache, "hard-edge cache capacity");
  search->add_option("--early-stop", se.early_stop, "stop an evaluation after this many violations (0 = off)");
  search->add_option("--rng", se.rng, "random seed");
  search->add_option("--out", se.out, "write the outcome JSON here");
  search->add_option("--jumps", se.jumps, "mutation magnitudes, e.g. 1,2,4");
  search->add_option("--promote-slack", se.promote_slack, "quick-to-confirm promotion slack");
  search->add_option("--frozen-point", se.frozen_point, "auxiliary index whose pair coefficients stay fixed");
  search->add_option("--exhaustive", se.exhaustive, "sweep every coefficient vector in lo:hi");

  std::string verify_graph;
  auto* verify = app.add_subcommand("verify", "re-derive every edge from the work-function operators");
  verify->add_option("--graph", verify_graph, "graph file")->required();

  ReportArgs re;
  auto* report = app.add_subcommand("report", "per-edge shortfall CSV for external plotting");
  report->add_option("--graph", re.graph, "graph file")->required();
  report->add_option("--potential", re.potential, "spec JSON file or builtin:<name>")->required();
  report->add_option("--c", re.c, "competitiveness ratio (default: k)");
  report->add_option("--csv", re.csv, "output CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*evaluate) return cmd_evaluate(ev);
    if (*certify_cmd) return cmd_certify(ce);
    if (*search) return cmd_search(se);
    if (*verify) return cmd_verify(verify_graph);
    if (*report) return cmd_report(re);
  } catch (const SearchConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace wfbench::cli
