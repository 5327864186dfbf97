// Command-line front end: scenario simulation, Monte Carlo sweeps, graph
// generation/inspection, centralized detection/identification baselines and
// scalar consensus drivers. Exit codes: 0 success, 1 bad configuration or
// usage, 2 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sentinet/central.hpp"
#include "sentinet/consensus.hpp"
#include "sentinet/csvio.hpp"
#include "sentinet/errors.hpp"
#include "sentinet/graph.hpp"
#include "sentinet/log.hpp"
#include "sentinet/scenario.hpp"
#include "sentinet/spectral.hpp"

namespace {

using namespace sentinet;

Eigen::VectorXd read_vector_csv(const std::string& path) {
  Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ConfigError(path + ": expected a single row or column of numbers");
}

std::vector<uint64_t> parse_seed_range(const std::string& text) {
  auto parse_one = [&](const std::string& s) -> uint64_t {
    try {
      size_t pos = 0;
      unsigned long long v = std::stoull(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("--seeds: cannot parse \"" + text + "\" (want a or a..b)");
    }
  };
  auto dots = text.find("..");
  if (dots == std::string::npos) return {parse_one(text)};
  uint64_t a = parse_one(text.substr(0, dots));
  uint64_t b = parse_one(text.substr(dots + 2));
  if (b < a) throw ConfigError("--seeds: range end before start");
  if (b - a > 100000) throw ConfigError("--seeds: range too large (max 100001 seeds)");
  std::vector<uint64_t> seeds;
  for (uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<uint64_t> seed, const std::string& kernel) {
  ScenarioConfig cfg = load_config(config_path);
  ResolvedScenario rs = resolve_scenario(cfg);
  uint64_t trial = seed ? *seed : rs.cfg.trial_seeds.front();
  RunOptions opt;
  if (kernel == "serial") opt.parallel = false;
  if (kernel == "parallel") opt.parallel = true;
  ScenarioResult result = run_scenario(rs, trial, opt);
  emit_config_echo(rs, out_dir);
  emit_run_outputs(rs, result, out_dir);
  std::printf(
      "seed=%llu outcome=%s flags=%d/%d first_flag_t=%ld max_rel_error=%.6g "
      "snr_db=%.2f\n",
      static_cast<unsigned long long>(trial), result.summary.outcome.c_str(),
      result.summary.flagged_count,
      rs.graph.node_count - result.summary.compromised_count,
      result.summary.first_flag_t, result.summary.max_final_rel_error,
      result.summary.mean_snr_db);
  return 0;
}

int cmd_mc(const std::string& config_path, const std::string& out_dir,
           const std::string& seeds_text) {
  ScenarioConfig cfg = load_config(config_path);
  ResolvedScenario rs = resolve_scenario(cfg);
  std::vector<uint64_t> seeds =
      seeds_text.empty() ? rs.cfg.trial_seeds : parse_seed_range(seeds_text);
  McResult mc = run_monte_carlo(rs, seeds);
  emit_config_echo(rs, out_dir);
  emit_mc_outputs(mc, out_dir);
  int converged = 0, detected = 0, missed = 0;
  for (const auto& r : mc.runs) {
    converged += r.outcome == "Converged";
    detected += r.outcome == "Detected";
    missed += r.outcome == "MissedAndWrong";
  }
  std::printf("runs=%zu converged=%d detected=%d missed_and_wrong=%d\n",
              mc.runs.size(), converged, detected, missed);
  return 0;
}

int cmd_graph_gen(int n, double side, double radius, uint64_t seed,
                  const std::string& out_dir, bool allow_disconnected,
                  int retry_cap) {
  Graph g;
  uint64_t used = seed;
  bool connected = false;
  for (int attempt = 0; attempt <= retry_cap; ++attempt, ++used) {
    g = random_geometric_graph(n, side, radius, used);
    connected = is_connected(g);
    if (connected || allow_disconnected) break;
  }
  if (!connected && !allow_disconnected)
    throw RunError("no connected graph within " + std::to_string(retry_cap + 1) +
                   " seeds; increase the radius");
  std::filesystem::create_directories(out_dir);
  write_edges_csv(g, std::filesystem::path(out_dir) / "edges.csv");
  write_positions_csv(g, std::filesystem::path(out_dir) / "positions.csv");
  std::printf("nodes=%d edges=%zu connected=%s seed=%llu\n", g.node_count,
              g.edges.size(), connected ? "yes" : "no",
              static_cast<unsigned long long>(used));
  return 0;
}

int cmd_graph_check(const std::string& edges_path, const std::string& positions_path) {
  Graph g = read_graph_csv(edges_path,
                           positions_path.empty()
                               ? std::nullopt
                               : std::optional<std::filesystem::path>(positions_path));
  auto deg = g.degrees();
  int dmin = g.node_count ? *std::min_element(deg.begin(), deg.end()) : 0;
  int dmax = g.node_count ? *std::max_element(deg.begin(), deg.end()) : 0;
  bool connected = is_connected(g);
  double l2 = g.node_count ? laplacian_lambda2(laplacian(g)) : 0.0;
  std::printf("nodes=%d edges=%zu connected=%s min_degree=%d max_degree=%d "
              "lambda2=%.6g\n",
              g.node_count, g.edges.size(), connected ? "yes" : "no", dmin, dmax, l2);
  return 0;
}

int cmd_detect(const std::string& h_path, const std::string& y_path, double tau,
               bool dynamic, const std::string& a_path, int steps) {
  Eigen::MatrixXd h = read_matrix_csv(h_path);
  Eigen::VectorXd y = read_vector_csv(y_path);
  DetectResult r;
  if (dynamic) {
    if (a_path.empty()) throw ConfigError("--dynamic needs --a");
    Eigen::MatrixXd a = read_matrix_csv(a_path);
    r = dynamic_residual_detect(h, a, y, steps, tau);
  } else {
    r = residual_detect(h, y, tau);
  }
  std::printf("alarm=%d residual=%.17g tau=%.17g\n", r.alarm ? 1 : 0,
              r.residual_norm, tau);
  return 0;
}

int cmd_identify(const std::string& h_path, const std::string& y_path, int s_max,
                 const std::string& method, const std::string& out_path) {
  Eigen::MatrixXd h = read_matrix_csv(h_path);
  Eigen::VectorXd y = read_vector_csv(y_path);
  IdentifyResult r =
      method == "l1" ? identify_l1(h, y) : identify_l0(h, y, s_max);
  std::string theta_txt, support_txt;
  for (int i = 0; i < r.theta.size(); ++i)
    theta_txt += (i ? "," : "") + format_double(r.theta(i));
  for (size_t i = 0; i < r.support.size(); ++i)
    support_txt += (i ? "," : "") + std::to_string(r.support[i]);
  std::printf("theta=%s\nsupport=%s\n", theta_txt.c_str(), support_txt.c_str());
  if (!out_path.empty()) {
    nlohmann::ordered_json j;
    j["method"] = method;
    j["theta"] = std::vector<double>(r.theta.data(), r.theta.data() + r.theta.size());
    j["attack"] =
        std::vector<double>(r.attack.data(), r.attack.data() + r.attack.size());
    j["support"] = r.support;
    std::ofstream out(out_path);
    if (!out) throw RunError("cannot write " + out_path);
    out << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_consensus(const std::string& algo, const std::string& edges_path,
                  const std::string& init_path, int steps, int f, double c,
                  const std::vector<int>& reliable, const std::string& out_path) {
  Graph g = read_graph_csv(edges_path, std::nullopt);
  Eigen::VectorXd x = read_indexed_values_csv(init_path);
  if (x.size() != g.node_count)
    throw ConfigError("--init: got " + std::to_string(x.size()) + " values for " +
                      std::to_string(g.node_count) + " nodes");
  const int n = g.node_count;
  auto adj = g.adjacency();
  Eigen::MatrixXd w = metropolis_weights(g);
  std::vector<char> is_reliable(n, 0);
  for (int node : reliable) {
    if (node < 0 || node >= n) throw ConfigError("--reliable: node out of range");
    is_reliable[node] = 1;
  }
  Eigen::VectorXd anchors = x;  // reliable agents keep broadcasting x(0)

  for (int t = 0; t < steps; ++t) {
    Eigen::VectorXd next(n);
    if (algo == "avg") {
      next = average_consensus_step(x, w);
    } else if (algo == "wmsr") {
      for (int i = 0; i < n; ++i) {
        std::vector<NeighborValue> nbrs;
        for (int l : adj[i]) nbrs.push_back({x(l), w(i, l), l});
        next(i) = wmsr_step(x(i), w(i, i), nbrs, f).value;
      }
    } else if (algo == "leblanc") {
      for (int i = 0; i < n; ++i) {
        std::vector<NeighborValue> step_values;
        double share = 1.0 / (static_cast<double>(adj[i].size()) + 1.0);
        for (int l : adj[i]) step_values.push_back({x(l) - x(i), share, l});
        next(i) = step_value_update(
            is_reliable[i] ? NodeRole::reliable : NodeRole::normal, x(i),
            anchors(i), step_values, f);
      }
    } else {  // adaptive
      for (int i = 0; i < n; ++i) {
        std::vector<Eigen::VectorXd> nbr_states;
        std::vector<double> nbr_weights;
        for (int l : adj[i]) {
          nbr_states.push_back(Eigen::VectorXd::Constant(1, x(l)));
          nbr_weights.push_back(w(i, l));
        }
        next(i) = adaptive_weight_step(Eigen::VectorXd::Constant(1, x(i)),
                                       nbr_states, nbr_weights, c)(0);
      }
    }
    x = next;
  }

  std::string csv = "node,value\n";
  for (int i = 0; i < n; ++i) csv += std::to_string(i) + "," + format_double(x(i)) + "\n";
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw RunError("cannot write " + out_path);
    out << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"networked sensing simulator: resilient distributed estimation "
               "with byzantine agents"};
  // --h is a real option on some subcommands, so no -h shorthand anywhere
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  // simulate
  std::string sim_config, sim_out, sim_kernel;
  std::optional<uint64_t> sim_seed;
  auto* sim = app.add_subcommand("simulate", "run one scenario trial");
  sim->set_help_flag("--help", "print help");
  sim->add_option("--config", sim_config, "scenario config (json)")->required();
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--seed", sim_seed, "trial seed (default: first configured seed)");
  sim->add_option("--kernel", sim_kernel, "override kernel: serial|parallel")
      ->check(CLI::IsMember({"serial", "parallel"}));

  // mc
  std::string mc_config, mc_out, mc_seeds;
  auto* mc = app.add_subcommand("mc", "monte carlo sweep over trial seeds");
  mc->set_help_flag("--help", "print help");
  mc->add_option("--config", mc_config, "scenario config (json)")->required();
  mc->add_option("--seeds", mc_seeds, "seed range a..b (default: configured seeds)");
  mc->add_option("--out", mc_out, "output directory")->required();

  // graph gen / check
  auto* graph = app.add_subcommand("graph", "graph utilities");
  graph->set_help_flag("--help", "print help");
  graph->require_subcommand(1);
  int gg_n = 50, gg_retry = 100;
  double gg_side = 2000, gg_radius = 632;
  uint64_t gg_seed = 1;
  std::string gg_out;
  bool gg_allow_disconnected = false;
  auto* ggen = graph->add_subcommand("gen", "sample a random geometric graph");
  ggen->set_help_flag("--help", "print help");
  ggen->add_option("--n", gg_n, "node count");
  ggen->add_option("--side", gg_side, "deployment square side");
  ggen->add_option("--radius", gg_radius, "connection radius");
  ggen->add_option("--seed", gg_seed, "placement seed");
  ggen->add_option("--out", gg_out, "output directory")->required();
  ggen->add_flag("--allow-disconnected", gg_allow_disconnected,
                 "keep the first sample even if disconnected");
  ggen->add_option("--retry-cap", gg_retry, "connectivity retries");
  std::string gc_edges, gc_positions;
  auto* gcheck = graph->add_subcommand("check", "inspect a graph csv");
  gcheck->set_help_flag("--help", "print help");
  gcheck->add_option("--edges", gc_edges, "edges csv (i,j)")->required();
  gcheck->add_option("--positions", gc_positions, "positions csv (node,x,y)");

  // detect
  std::string det_h, det_y, det_a;
  double det_tau = 0.0;
  bool det_dynamic = false;
  int det_steps = 1;
  auto* det = app.add_subcommand("detect", "centralized residual alarm");
  det->set_help_flag("--help", "print help");
  det->add_option("--h", det_h, "measurement matrix csv")->required();
  det->add_option("--y", det_y, "measurement vector csv")->required();
  det->add_option("--tau", det_tau, "alarm threshold")->required();
  det->add_flag("--dynamic", det_dynamic, "stacked multi-step variant");
  det->add_option("--a", det_a, "state transition matrix csv (with --dynamic)");
  det->add_option("--steps", det_steps, "observation steps (with --dynamic)");

  // identify
  std::string id_h, id_y, id_method = "l0", id_out;
  int id_smax = 1;
  auto* ident = app.add_subcommand("identify", "sparse attack identification");
  ident->set_help_flag("--help", "print help");
  ident->add_option("--h", id_h, "measurement matrix csv")->required();
  ident->add_option("--y", id_y, "measurement vector csv")->required();
  ident->add_option("--s-max", id_smax, "max corrupted rows (l0 search)");
  ident->add_option("--method", id_method, "l0 (exhaustive) or l1 (relaxation)")
      ->check(CLI::IsMember({"l0", "l1"}));
  ident->add_option("--out", id_out, "write result json here");

  // consensus
  std::string cs_algo, cs_edges, cs_init, cs_out;
  int cs_steps = 100, cs_f = 1;
  double cs_c = 1.0;
  std::vector<int> cs_reliable;
  auto* cons = app.add_subcommand("consensus", "scalar consensus drivers");
  cons->set_help_flag("--help", "print help");
  cons->add_option("--algo", cs_algo, "avg|wmsr|leblanc|adaptive")
      ->required()
      ->check(CLI::IsMember({"avg", "wmsr", "leblanc", "adaptive"}));
  cons->add_option("--edges", cs_edges, "edges csv")->required();
  cons->add_option("--init", cs_init, "initial values csv (index,value)")->required();
  cons->add_option("--steps", cs_steps, "iterations");
  cons->add_option("--f", cs_f, "trim budget per side (wmsr / leblanc)");
  cons->add_option("--c", cs_c, "adaptive down-weighting scale");
  cons->add_option("--reliable", cs_reliable, "anchor nodes (leblanc)")
      ->delimiter(',');
  cons->add_option("--out", cs_out, "write final values here (default stdout)");

  try {
    app.parse(argc, argv);
    if (*sim) return cmd_simulate(sim_config, sim_out, sim_seed, sim_kernel);
    if (*mc) return cmd_mc(mc_config, mc_out, mc_seeds);
    if (*graph) {
      if (*ggen)
        return cmd_graph_gen(gg_n, gg_side, gg_radius, gg_seed, gg_out,
                             gg_allow_disconnected, gg_retry);
      return cmd_graph_check(gc_edges, gc_positions);
    }
    if (*det) return cmd_detect(det_h, det_y, det_tau, det_dynamic, det_a, det_steps);
    if (*ident) return cmd_identify(id_h, id_y, id_smax, id_method, id_out);
    if (*cons)
      return cmd_consensus(cs_algo, cs_edges, cs_init, cs_steps, cs_f, cs_c,
                           cs_reliable, cs_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const sentinet::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const sentinet::RunError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
