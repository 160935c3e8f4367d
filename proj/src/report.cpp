#include "consctl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "consctl/error.hpp"
#include "consctl/graph.hpp"
#include "consctl/graph_io.hpp"
#include "consctl/leader_select.hpp"
#include "consctl/regular_graphs.hpp"
#include "consctl/spectral.hpp"
#include "consctl/structural.hpp"
#include "consctl/weight_adjust.hpp"

namespace consctl::cli {

namespace {

using Json = nlohmann::ordered_json;

struct GlobalOptions {
  std::optional<double> rank_tol;
  std::optional<double> zero_tol;
  std::optional<double> cluster_tol;
  std::uint64_t seed = 1;
  std::string json_path;
  bool quiet = false;
};

struct Outcome {
  Json body = Json::object();
  std::string text;
  int code = kPositive;
};

// 12 significant digits; -0 prints as 0.
double round12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

Json complex_json(Complex z) { return {{"re", round12(z.real())}, {"im", round12(z.imag())}}; }

std::string complex_text(Complex z) {
  char buf[64];
  const double re = round12(z.real());
  const double im = round12(z.imag());
  if (im == 0.0) {
    std::snprintf(buf, sizeof buf, "%.6g", re);
  } else {
    std::snprintf(buf, sizeof buf, "%.6g %c %.6gi", re, im < 0 ? '-' : '+', std::abs(im));
  }
  return buf;
}

Json one_based(std::span<const NodeId> ids) {
  Json a = Json::array();
  for (NodeId v : ids) a.push_back(v + 1);
  return a;
}

std::string set_text(std::span<const NodeId> ids) {
  std::string s = "{";
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(ids[k] + 1);
  }
  return s + "}";
}

std::vector<NodeId> zero_based(const std::vector<int>& labels, int n, const char* what) {
  std::vector<NodeId> out;
  for (int v : labels) {
    if (v < 1 || v > n) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + ": node " +
                                                  std::to_string(v) + " outside 1.." +
                                                  std::to_string(n));
    }
    out.push_back(v - 1);
  }
  return out;
}

Tolerances tolerances(const GlobalOptions& o) {
  Tolerances t;
  t.cluster = o.cluster_tol;
  if (o.rank_tol) t.rank = *o.rank_tol;
  if (o.zero_tol) t.zero = *o.zero_tol;
  return t;
}

Json tolerance_json(const Tolerances& t, std::optional<double> cluster_used) {
  Json j;
  j["rank"] = t.rank;
  j["zero"] = t.zero;
  if (cluster_used) {
    j["cluster"] = *cluster_used;
  } else {
    j["cluster"] = nullptr;
  }
  return j;
}

Json verdict_json(const ControllabilityVerdict& v) {
  return {{"controllable", v.controllable},
          {"rank", v.rank},
          {"method", std::string(to_string(v.method))},
          {"tolerance", v.tolerance}};
}

Json graph_json(const DirectedGraph& g) {
  return {{"n", g.size()},
          {"edge_count", g.edge_count()},
          {"in_degree_regular", is_in_degree_regular(g)},
          {"echo", format_graph(g)}};
}

Json spectrum_json(const Spectrum& s) {
  Json a = Json::array();
  for (const auto& e : s.eigs) {
    a.push_back({{"lambda", complex_json(e.lambda)},
                 {"alg_mult", e.alg_mult},
                 {"geo_mult", e.geo_mult}});
  }
  return a;
}

void spectrum_text(std::ostringstream& t, const Spectrum& s) {
  t << "spectrum (cluster tol " << s.cluster_tol << "):\n";
  char line[128];
  std::snprintf(line, sizeof line, "  %-28s %4s %4s\n", "lambda", "alg", "geo");
  t << line;
  for (const auto& e : s.eigs) {
    std::snprintf(line, sizeof line, "  %-28s %4d %4d\n", complex_text(e.lambda).c_str(),
                  e.alg_mult, e.geo_mult);
    t << line;
  }
}

Outcome cmd_analyze(const DirectedGraph& g, const Tolerances& tol) {
  Outcome o;
  std::ostringstream t;
  const int n = g.size();
  const Eigen::MatrixXd L = laplacian(g);
  const Spectrum s = eigen_decompose(L, tol.cluster);
  o.body["tolerances"] = tolerance_json(tol, s.cluster_tol);
  o.body["graph"] = graph_json(g);

  Json eigs = spectrum_json(s);
  for (std::size_t k = 0; k < s.eigs.size(); ++k) {
    const JordanStructure js = jordan_block_sizes(L, s.eigs[k].lambda);
    eigs[k]["jordan_blocks"] = js.sizes;
    eigs[k]["jordan_low_confidence"] = js.low_confidence;
  }
  o.body["spectrum"] = eigs;
  const bool cyclic = is_cyclic(s);
  o.body["cyclic"] = cyclic;

  const std::vector<NodeId> slc = slc_candidates(L, s, tol);
  o.body["slc"] = {{"value", !slc.empty()}, {"candidates", one_based(slc)}};
  const LeaderBounds b = min_leader_bounds(s);
  o.body["leader_bounds"] = {{"lower", b.lower}, {"upper", b.upper}};

  const StructuralLeaders sl = min_structural_leaders(g);
  const std::vector<NodeId> roots = spanning_tree_roots(g);
  o.body["structural"] = {{"min_leaders", sl.count},
                          {"witness", one_based(sl.witness.agents())},
                          {"spanning_tree_roots", one_based(roots)}};

  Json agents = Json::array();
  Json warnings = Json::array();
  for (NodeId i = 0; i < n; ++i) {
    const Eigen::MatrixXd B = Eigen::VectorXd::Unit(n, i);
    const ControllabilityVerdict k = kalman_verdict(L, B, tol);
    const ControllabilityVerdict p = pbh_verdict(L, B, s, tol);
    agents.push_back({{"agent", i + 1},
                      {"kalman_rank", k.rank},
                      {"kalman", k.controllable},
                      {"pbh", p.controllable}});
    if (k.controllable != p.controllable) {
      warnings.push_back("agent " + std::to_string(i + 1) +
                         ": Kalman and PBH verdicts disagree");
    }
  }
  o.body["single_leader"] = agents;
  o.body["warnings"] = warnings;

  t << "graph: " << n << " nodes, " << g.edge_count() << " edges\n";
  spectrum_text(t, s);
  t << "cyclic: " << (cyclic ? "yes" : "no") << "\n";
  t << "single-leader controllable: " << (slc.empty() ? "no" : "yes");
  if (!slc.empty()) t << " (agents " << set_text(slc) << ")";
  t << "\n";
  t << "leader count bounds: [" << b.lower << ", " << b.upper << "]\n";
  t << "structural: " << sl.count << " leader(s) needed, e.g. " << set_text(sl.witness.agents())
    << "\n";
  t << "  agent  kalman rank  kalman  pbh\n";
  for (const auto& a : agents) {
    char line[96];
    std::snprintf(line, sizeof line, "  %5d  %11d  %-6s  %s\n", a["agent"].get<int>(),
                  a["kalman_rank"].get<int>(), a["kalman"].get<bool>() ? "yes" : "no",
                  a["pbh"].get<bool>() ? "yes" : "no");
    t << line;
  }
  for (const auto& w : warnings) t << "warning: " << w.get<std::string>() << "\n";

  o.text = t.str();
  o.code = slc.empty() ? kNegative : kPositive;
  return o;
}

Outcome cmd_leaders(const DirectedGraph& g, const Tolerances& tol,
                    const std::vector<int>& require, bool all, std::uint64_t budget) {
  Outcome o;
  std::ostringstream t;
  const int n = g.size();
  const Eigen::MatrixXd L = laplacian(g);
  const Spectrum s = eigen_decompose(L, tol.cluster);
  o.body["tolerances"] = tolerance_json(tol, s.cluster_tol);
  o.body["graph"] = graph_json(g);

  LeaderSearchOptions opt;
  opt.required_agents = zero_based(require, n, "--require");
  opt.enumerate_all = all;
  opt.budget = budget;
  std::sort(opt.required_agents.begin(), opt.required_agents.end());
  const LeaderSearchResult r = minimal_leader_sets(L, s, opt, tol);
  const LeaderBounds b = min_leader_bounds(s);

  Json sets = Json::array();
  Json warnings = Json::array();
  for (const LeaderSet& set : r.sets) {
    const ControllabilityVerdict k = kalman_verdict(L, input_matrix(set, n), tol);
    sets.push_back({{"agents", one_based(set.agents())}, {"kalman", verdict_json(k)}});
    if (!k.controllable) {
      warnings.push_back("set " + set_text(set.agents()) +
                         " passes the eigenvector test but fails the Kalman test");
    }
  }
  o.body["required"] = one_based(opt.required_agents);
  o.body["enumerate_all"] = all;
  o.body["leader_bounds"] = {{"lower", b.lower}, {"upper", b.upper}};
  o.body["cardinality"] = r.cardinality;
  o.body["sets"] = sets;
  o.body["candidates_tested"] = r.candidates_tested;
  o.body["warnings"] = warnings;

  t << "leader count bounds: [" << b.lower << ", " << b.upper << "]\n";
  if (!opt.required_agents.empty()) t << "required: " << set_text(opt.required_agents) << "\n";
  if (r.sets.empty()) {
    t << "no controlling leader set found\n";
  } else {
    t << "minimum leader count: " << r.cardinality << "\n";
    for (const LeaderSet& set : r.sets) t << "  " << set_text(set.agents()) << "\n";
  }
  t << "candidates tested: " << r.candidates_tested << "\n";
  for (const auto& w : warnings) t << "warning: " << w.get<std::string>() << "\n";

  o.text = t.str();
  o.code = r.sets.empty() ? kNegative : kPositive;
  return o;
}

Outcome cmd_structural(const DirectedGraph& g, const Tolerances& tol,
                       const std::vector<int>& leader_labels, std::optional<int> certify,
                       std::uint64_t seed) {
  Outcome o;
  std::ostringstream t;
  const int n = g.size();
  const LeaderSet leaders(zero_based(leader_labels, n, "--leaders"), n);
  const Eigen::MatrixXd L = laplacian(g);
  o.body["tolerances"] = tolerance_json(tol, std::nullopt);
  o.body["graph"] = graph_json(g);
  o.body["leaders"] = one_based(leaders.agents());

  const bool structural = structurally_controllable(g, leaders);
  const StructuralLeaders sl = min_structural_leaders(g);
  const ControllabilityVerdict k = kalman_verdict(L, input_matrix(leaders, n), tol);
  o.body["structurally_controllable"] = structural;
  o.body["min_structural_leaders"] = {{"count", sl.count},
                                      {"witness", one_based(sl.witness.agents())}};
  o.body["given_weights"] = verdict_json(k);

  t << "leaders " << set_text(leaders.agents()) << ": structurally controllable: "
    << (structural ? "yes" : "no") << "\n";
  t << "fewest structural leaders: " << sl.count << ", e.g. " << set_text(sl.witness.agents())
    << "\n";
  t << "with the given weights: " << (k.controllable ? "controllable" : "not controllable")
    << " (rank " << k.rank << " of " << n << ")\n";

  std::optional<NodeId> root;
  try {
    root = tree_root(g);
  } catch (const Error&) {
  }
  if (root && leaders.size() == 1 && leaders.agents()[0] == *root) {
    const bool tw = tree_weight_controllable(g, *root);
    o.body["tree_weights_distinct_across_branches"] = tw;
    t << "tree weight test: " << (tw ? "passes" : "fails") << "\n";
  }

  bool certified = true;
  if (certify) {
    if (*certify < 1) throw Error(ErrorKind::InvalidArgument, "--certify needs at least 1 trial");
    const auto w = certify_by_random_weights(g, leaders, *certify, seed, tol);
    Json c = {{"trials", *certify}, {"seed", seed}};
    if (w) {
      c["witness"] = {{"trial", w->trial}, {"graph", format_graph(w->graph)}};
      t << "certified by random weights at trial " << w->trial << "\n";
    } else {
      c["witness"] = nullptr;
      t << "no controllable weighting found in " << *certify << " trials\n";
    }
    o.body["certification"] = c;
    certified = w.has_value();
  }

  o.text = t.str();
  o.code = structural && certified ? kPositive : kNegative;
  return o;
}

Outcome cmd_adjust(const DirectedGraph& g, const Tolerances& tol, double theta,
                   std::optional<int> root, int max_iterations) {
  Outcome o;
  std::ostringstream t;
  const int n = g.size();
  o.body["tolerances"] = tolerance_json(tol, std::nullopt);
  o.body["graph"] = graph_json(g);

  AdjustOptions opt;
  opt.theta0 = theta;
  opt.max_iterations = max_iterations;
  opt.tol = tol;
  if (root) opt.root = zero_based({*root}, n, "--root").front();

  AdjustmentPlan plan;
  try {
    plan = adjust_weights(g, opt);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoSpanningTree) throw;
    o.body["plan"] = nullptr;
    o.body["reason"] = e.what();
    o.text = std::string("no plan: ") + e.what() + "\n";
    o.code = kNegative;
    return o;
  }

  Json p;
  p["root"] = plan.root + 1;
  Json relabel = Json::array();
  for (NodeId v : plan.relabel) relabel.push_back(v + 1);
  p["relabel"] = relabel;
  Json probes = Json::array();
  for (const RootProbe& r : plan.probes) probes.push_back({{"root", r.root + 1}, {"rank", r.rank}});
  p["probes"] = probes;
  p["initial_rank"] = plan.initial_rank;
  Json edges = Json::array();
  for (const AdjustedEdge& e : plan.adjusted_edges) {
    edges.push_back({{"src", e.src + 1},
                     {"dst", e.dst + 1},
                     {"old_weight", e.old_weight},
                     {"new_weight", e.new_weight}});
  }
  p["adjusted_edges"] = edges;
  p["iterations"] = plan.iterations;
  p["final_rank"] = plan.final_rank;
  p["theta_final"] = plan.theta_final;
  p["converged"] = plan.converged;
  p["method"] = plan.used_fallback ? "greedy" : "escalation";
  p["fallback_trials"] = plan.fallback_trials;
  p["diagnostic"] = plan.diagnostic;
  o.body["plan"] = p;

  t << "root: " << plan.root + 1 << " (initial rank " << plan.initial_rank << " of " << n
    << ")\n";
  if (plan.adjusted_edges.empty() && plan.converged) {
    t << "controllable with leader agent " << plan.root + 1 << "; no edge needs reweighting\n";
  }
  for (const AdjustedEdge& e : plan.adjusted_edges) {
    t << "  edge " << e.src + 1 << " -> " << e.dst + 1 << ": " << format_number(e.old_weight)
      << " -> " << format_number(e.new_weight) << "\n";
  }
  t << "iterations: " << plan.iterations << ", final rank " << plan.final_rank << "\n";
  if (plan.used_fallback) {
    t << "escalation stalled; edges found by greedy search (" << plan.fallback_trials
      << " trials)\n";
  }

  if (!plan.converged) {
    t << "iteration limit reached: " << plan.diagnostic << "\n";
    o.text = t.str();
    o.code = kLimitReached;
    return o;
  }

  const DirectedGraph adjusted = apply_plan(g, plan);
  const ControllabilityVerdict v = verify_plan(g, plan, tol);
  const Spectrum s = eigen_decompose(laplacian(adjusted), tol.cluster);
  o.body["verification"] = verdict_json(v);
  o.body["adjusted_spectrum"] = spectrum_json(s);
  o.body["adjusted_graph"] = format_graph(adjusted);

  t << "verification: " << (v.controllable ? "controllable" : "NOT controllable") << " (rank "
    << v.rank << ")\n";
  spectrum_text(t, s);
  o.text = t.str();
  o.code = v.controllable ? kPositive : kNegative;
  return o;
}

Json int_matrix_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows; ++i) {
    Json r = Json::array();
    for (int j = 0; j < m.cols; ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Outcome cmd_regular(const DirectedGraph& g, const Tolerances& tol) {
  Outcome o;
  std::ostringstream t;
  const int n = g.size();
  o.body["tolerances"] = tolerance_json(tol, std::nullopt);
  o.body["graph"] = graph_json(g);

  const bool slc1 = regular_slc_by_agent1(g);
  const bool never = regular_never_slc(g);
  const int bound = regular_leader_lower_bound(g);
  const bool structural = regular_structural(g);
  const ControllabilityVerdict k = kalman_verdict(laplacian(g), Eigen::VectorXd::Unit(n, 0), tol);
  const bool tree = min_forest_root_count(g) == 1;

  if (n >= 2) o.body["path_count_matrix"] = int_matrix_json(path_count_matrix(g));
  o.body["walk_sum_matrix"] = int_matrix_json(walk_sum_matrix(g));
  o.body["slc_by_agent1"] = slc1;
  o.body["never_slc"] = never;
  o.body["leader_lower_bound"] = bound;
  o.body["structural"] = structural;
  o.body["kalman_agent1"] = verdict_json(k);
  Json warnings = Json::array();
  if (k.controllable != slc1) {
    warnings.push_back("path-count test and Kalman test disagree for agent 1");
  }
  if (structural != tree) {
    warnings.push_back("walk-sum structural test and spanning-tree check disagree");
  }
  o.body["warnings"] = warnings;

  t << "agent 1 controls alone: " << (slc1 ? "yes" : "no") << "\n";
  t << "no single leader can work: " << (never ? "yes" : "no") << "\n";
  t << "leaders needed (lower bound): " << bound << "\n";
  t << "structurally controllable with one leader: " << (structural ? "yes" : "no") << "\n";
  for (const auto& w : warnings) t << "warning: " << w.get<std::string>() << "\n";
  o.text = t.str();
  o.code = slc1 ? kPositive : kNegative;
  return o;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BudgetExceeded:
    case ErrorKind::Overflow:
      return kLimitReached;
    default:
      return kInputError;
  }
}

void write_json(const Json& report, const std::string& path, std::ostream& out) {
  const std::string bytes = report.dump(2) + "\n";
  if (path == "-") {
    out << bytes;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  f << bytes;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controllability analysis of leader-follower consensus networks", "consctl"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--tol", g.rank_tol, "Relative rank tolerance for Kalman tests (default 1e-9)")
      ->check(CLI::PositiveNumber);
  app.add_option("--zero-tol", g.zero_tol,
                 "Threshold for eigenvector entries and PBH ranks (default 1e-7)")
      ->check(CLI::PositiveNumber);
  app.add_option("--cluster-tol", g.cluster_tol, "Absolute eigenvalue clustering tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for randomized certification");
  app.add_option("--json", g.json_path, "Write the JSON report here ('-' for stdout)");
  app.add_flag("--quiet", g.quiet, "Suppress the text report");

  std::string file;
  auto* analyze = app.add_subcommand("analyze", "Spectrum, single-leader and structural summary");
  analyze->add_option("file", file, "Graph file")->required();

  std::vector<int> require;
  bool all = false;
  std::uint64_t budget = 2'000'000;
  auto* leaders = app.add_subcommand("leaders", "Fewest leaders that control the network");
  leaders->add_option("file", file, "Graph file")->required();
  leaders->add_option("--require", require, "Agents that must lead (comma separated)")
      ->delimiter(',');
  leaders->add_flag("--all", all, "List every minimal set, not just the first");
  leaders->add_option("--budget", budget, "Maximum number of candidate sets to test");

  std::vector<int> leader_labels;
  std::optional<int> certify;
  auto* structural = app.add_subcommand("structural", "Topology-only controllability");
  structural->add_option("file", file, "Graph file")->required();
  structural->add_option("--leaders", leader_labels, "Leader agents (comma separated)")
      ->delimiter(',')
      ->required();
  structural->add_option("--certify", certify, "Random weightings to try");

  double theta = 0.1;
  std::optional<int> root;
  int max_iterations = 200;
  auto* adjust = app.add_subcommand("adjust", "Reweight the fewest edges for one-leader control");
  adjust->add_option("file", file, "Graph file")->required();
  adjust->add_option("--theta", theta, "Initial weight step")->check(CLI::PositiveNumber);
  adjust->add_option("--root", root, "Leader to use instead of the best root");
  adjust->add_option("--max-iter", max_iterations, "Iteration limit")
      ->check(CLI::NonNegativeNumber);

  auto* regular = app.add_subcommand("regular", "Path-count tests for in-degree regular graphs");
  regular->add_option("file", file, "Graph file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPositive : kInputError;
  }

  CLI::App* cmd = app.get_subcommands().front();
  Json report;
  report["schema_version"] = kReportSchemaVersion;
  report["tool"] = {{"name", "consctl"}, {"version", std::string(kToolVersion)}};
  report["command"] = cmd->get_name();
  report["input"] = file;
  report["seed"] = g.seed;

  Outcome o;
  try {
    const Tolerances tol = tolerances(g);
    DirectedGraph graph;
    try {
      graph = read_graph_file(file);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse) throw Error(e.kind(), file + ": " + e.what());
      throw;
    }
    if (cmd == analyze) {
      o = cmd_analyze(graph, tol);
    } else if (cmd == leaders) {
      o = cmd_leaders(graph, tol, require, all, budget);
    } else if (cmd == structural) {
      o = cmd_structural(graph, tol, leader_labels, certify, g.seed);
    } else if (cmd == adjust) {
      o = cmd_adjust(graph, tol, theta, root, max_iterations);
    } else {
      o = cmd_regular(graph, tol);
    }
  } catch (const Error& e) {
    err << "consctl: " << to_string(e.kind()) << ": " << e.what() << "\n";
    o.code = exit_code_for(e.kind());
    o.body = {{"error", {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}}}};
    o.text.clear();
  }

  for (auto& [key, value] : o.body.items()) report[key] = value;
  report["exit_code"] = o.code;
  if (!g.quiet && g.json_path != "-") out << o.text;
  if (!g.json_path.empty()) {
    try {
      write_json(report, g.json_path, out);
    } catch (const Error& e) {
      err << "consctl: " << e.what() << "\n";
      return kInputError;
    }
  }
  return o.code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, std::cout, std::cerr);
}

}  // namespace consctl::cli
