#include "sentinet/scenario.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "sentinet/csvio.hpp"
#include "sentinet/errors.hpp"
#include "sentinet/estimator.hpp"
#include "sentinet/log.hpp"
#include "sentinet/rng.hpp"
#include "sentinet/svgplot.hpp"

namespace sentinet {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// config parsing

namespace {

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

double get_num(const json& j, const std::string& key, const std::string& where,
               std::optional<double> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    throw ConfigError(where + ": missing \"" + key + "\"");
  }
  if (!j[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return j[key].get<double>();
}

long get_int(const json& j, const std::string& key, const std::string& where,
             std::optional<long> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    throw ConfigError(where + ": missing \"" + key + "\"");
  }
  if (!j[key].is_number_integer())
    throw ConfigError(where + "." + key + ": expected an integer");
  return j[key].get<long>();
}

std::string get_str(const json& j, const std::string& key, const std::string& where,
                    std::optional<std::string> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    throw ConfigError(where + ": missing \"" + key + "\"");
  }
  if (!j[key].is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return j[key].get<std::string>();
}

bool get_bool(const json& j, const std::string& key, const std::string& where, bool def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_boolean()) throw ConfigError(where + "." + key + ": expected a bool");
  return j[key].get<bool>();
}

Eigen::VectorXd get_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a numeric array");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected a numeric array");
    v(i) = j[i].get<double>();
  }
  return v;
}

AttackSpec parse_custom_agents(const json& agents, const std::string& where) {
  if (!agents.is_array()) throw ConfigError(where + ": expected an array");
  AttackSpec spec;
  for (size_t i = 0; i < agents.size(); ++i) {
    const json& a = agents[i];
    std::string ctx = where + "[" + std::to_string(i) + "]";
    check_keys(a, ctx, {"node", "type", "value", "scale", "component", "direction",
                        "cap", "pin_factor", "offset"});
    int node = static_cast<int>(get_int(a, "node", ctx));
    if (spec.agents.count(node))
      throw ConfigError(ctx + ": node " + std::to_string(node) + " listed twice");
    std::string type = get_str(a, "type", ctx);
    if (type == "constant") {
      if (!a.contains("value")) throw ConfigError(ctx + ": constant needs \"value\"");
      spec.agents.emplace(node, ConstantBroadcast{get_vector(a["value"], ctx + ".value")});
    } else if (type == "random") {
      RandomBroadcast rb;
      rb.scale = get_num(a, "scale", ctx);
      if (rb.scale < 0) throw ConfigError(ctx + ": scale must be >= 0");
      spec.agents.emplace(node, rb);
    } else if (type == "stealthy") {
      StealthyBias sb;
      sb.component = static_cast<int>(get_int(a, "component", ctx));
      sb.direction = get_num(a, "direction", ctx, 1.0);
      if (sb.direction != 1.0 && sb.direction != -1.0)
        throw ConfigError(ctx + ": direction must be +1 or -1");
      if (a.contains("cap") && a.contains("pin_factor"))
        throw ConfigError(ctx + ": give either cap or pin_factor, not both");
      if (a.contains("cap")) sb.cap = get_num(a, "cap", ctx);
      if (a.contains("pin_factor")) sb.pin_factor = get_num(a, "pin_factor", ctx);
      spec.agents.emplace(node, sb);
    } else if (type == "measurement_offset") {
      if (!a.contains("offset"))
        throw ConfigError(ctx + ": measurement_offset needs \"offset\"");
      spec.agents.emplace(node,
                          MeasurementOffset{get_vector(a["offset"], ctx + ".offset")});
    } else {
      throw ConfigError(ctx + ": unknown attack type \"" + type + "\"");
    }
  }
  return spec;
}

json strategy_to_json(const AttackStrategy& s) {
  json a;
  if (const auto* cb = std::get_if<ConstantBroadcast>(&s)) {
    a["type"] = "constant";
    a["value"] = std::vector<double>(cb->value.data(), cb->value.data() + cb->value.size());
  } else if (const auto* rb = std::get_if<RandomBroadcast>(&s)) {
    a["type"] = "random";
    a["scale"] = rb->scale;
  } else if (const auto* sb = std::get_if<StealthyBias>(&s)) {
    a["type"] = "stealthy";
    a["component"] = sb->component;
    a["direction"] = sb->direction;
    if (sb->cap) a["cap"] = *sb->cap;
    if (sb->pin_factor) a["pin_factor"] = *sb->pin_factor;
  } else if (const auto* mo = std::get_if<MeasurementOffset>(&s)) {
    a["type"] = "measurement_offset";
    a["offset"] =
        std::vector<double>(mo->offset.data(), mo->offset.data() + mo->offset.size());
  }
  return a;
}

}  // namespace

ScenarioConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "config",
             {"schema_version", "graph", "sector_grid", "field", "noise_variance", "eta",
              "gains", "threshold", "attack", "horizon", "trial_seeds",
              "convergence_threshold", "trace_stride", "init_mode", "kernel"});
  ScenarioConfig cfg;
  cfg.schema_version = static_cast<int>(get_int(j, "schema_version", "config"));
  if (cfg.schema_version != 1)
    throw ConfigError("config: unsupported schema_version " +
                      std::to_string(cfg.schema_version));

  if (!j.contains("graph")) throw ConfigError("config: missing \"graph\"");
  const json& gj = j["graph"];
  check_keys(gj, "graph",
             {"type", "n", "side", "radius", "seed", "require_connected", "retry_cap",
              "edges", "positions"});
  cfg.graph.type = get_str(gj, "type", "graph", std::string("geometric"));
  cfg.graph.require_connected = get_bool(gj, "require_connected", "graph", true);
  cfg.graph.retry_cap = static_cast<int>(get_int(gj, "retry_cap", "graph", 100));
  if (cfg.graph.type == "geometric") {
    cfg.graph.n = static_cast<int>(get_int(gj, "n", "graph"));
    cfg.graph.side = get_num(gj, "side", "graph");
    cfg.graph.radius = get_num(gj, "radius", "graph");
    long seed = get_int(gj, "seed", "graph", 1);
    if (seed < 0) throw ConfigError("graph.seed: must be >= 0");
    cfg.graph.seed = static_cast<uint64_t>(seed);
  } else if (cfg.graph.type == "file") {
    cfg.graph.edges_file =
        (base_dir / get_str(gj, "edges", "graph")).lexically_normal().string();
    if (gj.contains("positions"))
      cfg.graph.positions_file =
          (base_dir / get_str(gj, "positions", "graph")).lexically_normal().string();
  } else {
    throw ConfigError("graph.type: expected \"geometric\" or \"file\"");
  }

  cfg.sector_grid = static_cast<int>(get_int(j, "sector_grid", "config", 3));
  if (j.contains("field")) {
    check_keys(j["field"], "field", {"low", "high"});
    cfg.field_low = get_num(j["field"], "low", "field");
    cfg.field_high = get_num(j["field"], "high", "field");
  }
  cfg.noise_variance = get_num(j, "noise_variance", "config", 170.0);
  if (j.contains("eta") && !j["eta"].is_null()) cfg.eta = get_num(j, "eta", "config");

  if (j.contains("gains")) {
    const json& gains = j["gains"];
    if (gains.is_string()) {
      if (gains.get<std::string>() != "auto")
        throw ConfigError("gains: expected \"auto\" or an object");
      cfg.gains.auto_mode = true;
    } else {
      check_keys(gains, "gains", {"alpha", "beta", "r1", "derived_by"});
      cfg.gains.auto_mode = false;
      cfg.gains.alpha = get_num(gains, "alpha", "gains");
      cfg.gains.beta = get_num(gains, "beta", "gains");
      cfg.gains.r1 = get_num(gains, "r1", "gains");
      cfg.gains.derived_by = get_str(gains, "derived_by", "gains", std::string());
    }
  }

  if (j.contains("threshold")) {
    check_keys(j["threshold"], "threshold", {"big_k", "tau_decay"});
    cfg.big_k = get_num(j["threshold"], "big_k", "threshold", 40.0);
    cfg.tau_decay = get_num(j["threshold"], "tau_decay", "threshold", 0.45);
  }

  if (j.contains("attack")) {
    const json& aj = j["attack"];
    check_keys(aj, "attack",
               {"mode", "pin_factor", "rho_safety", "center_sector", "retry_cap",
                "agents"});
    cfg.attack.mode = get_str(aj, "mode", "attack", std::string("none"));
    cfg.attack.pin_factor = get_num(aj, "pin_factor", "attack", 1.5);
    cfg.attack.rho_safety = get_num(aj, "rho_safety", "attack", 0.9);
    cfg.attack.center_sector =
        static_cast<int>(get_int(aj, "center_sector", "attack", -1));
    cfg.attack.retry_cap = static_cast<int>(get_int(aj, "retry_cap", "attack", 200));
    if (cfg.attack.mode == "custom") {
      if (!aj.contains("agents")) throw ConfigError("attack: custom mode needs \"agents\"");
      cfg.attack.custom = parse_custom_agents(aj["agents"], "attack.agents");
    } else if (aj.contains("agents")) {
      throw ConfigError("attack: \"agents\" only belongs to custom mode");
    }
    if (cfg.attack.mode != "none" && cfg.attack.mode != "strong" &&
        cfg.attack.mode != "weak" && cfg.attack.mode != "custom")
      throw ConfigError("attack.mode: expected none|strong|weak|custom");
  }

  cfg.horizon = get_int(j, "horizon", "config", 20000);
  if (j.contains("trial_seeds")) {
    if (!j["trial_seeds"].is_array() || j["trial_seeds"].empty())
      throw ConfigError("trial_seeds: expected a nonempty array of integers");
    cfg.trial_seeds.clear();
    for (const auto& s : j["trial_seeds"]) {
      if (!s.is_number_integer() || s.get<long long>() < 0)
        throw ConfigError("trial_seeds: entries must be nonnegative integers");
      cfg.trial_seeds.push_back(s.get<uint64_t>());
    }
  }
  cfg.convergence_threshold = get_num(j, "convergence_threshold", "config", 0.05);
  cfg.trace_stride = get_int(j, "trace_stride", "config", 50);
  cfg.init_mode = get_str(j, "init_mode", "config", std::string("zero"));
  cfg.kernel = get_str(j, "kernel", "config", std::string("parallel"));

  // basic range validation (everything structural happens in resolve)
  if (cfg.sector_grid < 1) throw ConfigError("sector_grid: must be >= 1");
  if (cfg.field_low > cfg.field_high) throw ConfigError("field: low > high");
  if (cfg.noise_variance < 0) throw ConfigError("noise_variance: must be >= 0");
  if (cfg.eta && *cfg.eta <= 0) throw ConfigError("eta: must be positive");
  if (cfg.big_k <= 0) throw ConfigError("threshold.big_k: must be positive");
  if (!(cfg.tau_decay > 0 && cfg.tau_decay < 0.5))
    throw ConfigError("threshold.tau_decay: must lie in (0, 1/2)");
  if (cfg.horizon < 1) throw ConfigError("horizon: must be >= 1");
  if (cfg.convergence_threshold <= 0)
    throw ConfigError("convergence_threshold: must be positive");
  if (cfg.trace_stride < 1) throw ConfigError("trace_stride: must be >= 1");
  if (cfg.init_mode != "zero" && cfg.init_mode != "truth")
    throw ConfigError("init_mode: expected zero|truth");
  if (cfg.kernel != "parallel" && cfg.kernel != "serial")
    throw ConfigError("kernel: expected parallel|serial");
  if (!(cfg.attack.rho_safety > 0 && cfg.attack.rho_safety < 1))
    throw ConfigError("attack.rho_safety: must lie in (0, 1)");
  if (!cfg.gains.auto_mode) {
    if (cfg.gains.alpha <= 0 || cfg.gains.beta <= 0)
      throw ConfigError("gains: alpha and beta must be positive");
    if (!(cfg.gains.r1 > 0 && cfg.gains.r1 <= 1))
      throw ConfigError("gains.r1: must lie in (0, 1]");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

ordered_json config_to_json(const ScenarioConfig& cfg) {
  ordered_json j;
  j["schema_version"] = cfg.schema_version;
  ordered_json gj;
  gj["type"] = cfg.graph.type;
  if (cfg.graph.type == "geometric") {
    gj["n"] = cfg.graph.n;
    gj["side"] = cfg.graph.side;
    gj["radius"] = cfg.graph.radius;
    gj["seed"] = cfg.graph.seed;
  } else {
    gj["edges"] = cfg.graph.edges_file;
    if (!cfg.graph.positions_file.empty()) gj["positions"] = cfg.graph.positions_file;
  }
  gj["require_connected"] = cfg.graph.require_connected;
  gj["retry_cap"] = cfg.graph.retry_cap;
  j["graph"] = gj;
  j["sector_grid"] = cfg.sector_grid;
  j["field"] = {{"low", cfg.field_low}, {"high", cfg.field_high}};
  j["noise_variance"] = cfg.noise_variance;
  if (cfg.eta) j["eta"] = *cfg.eta;
  if (cfg.gains.auto_mode) {
    j["gains"] = "auto";
  } else {
    ordered_json gains;
    gains["alpha"] = cfg.gains.alpha;
    gains["beta"] = cfg.gains.beta;
    gains["r1"] = cfg.gains.r1;
    if (!cfg.gains.derived_by.empty()) gains["derived_by"] = cfg.gains.derived_by;
    j["gains"] = gains;
  }
  j["threshold"] = {{"big_k", cfg.big_k}, {"tau_decay", cfg.tau_decay}};
  ordered_json aj;
  aj["mode"] = cfg.attack.mode;
  if (cfg.attack.mode != "none") {
    aj["pin_factor"] = cfg.attack.pin_factor;
    aj["rho_safety"] = cfg.attack.rho_safety;
    aj["center_sector"] = cfg.attack.center_sector;
    aj["retry_cap"] = cfg.attack.retry_cap;
  }
  if (cfg.attack.mode == "custom") {
    ordered_json agents = ordered_json::array();
    for (const auto& [node, strategy] : cfg.attack.custom.agents) {
      ordered_json a = strategy_to_json(strategy);
      ordered_json row;
      row["node"] = node;
      for (auto it = a.begin(); it != a.end(); ++it) row[it.key()] = it.value();
      agents.push_back(row);
    }
    aj["agents"] = agents;
  }
  j["attack"] = aj;
  j["horizon"] = cfg.horizon;
  j["trial_seeds"] = cfg.trial_seeds;
  j["convergence_threshold"] = cfg.convergence_threshold;
  j["trace_stride"] = cfg.trace_stride;
  j["init_mode"] = cfg.init_mode;
  j["kernel"] = cfg.kernel;
  return j;
}

// ---------------------------------------------------------------------------
// resolution

ResolvedScenario resolve_scenario(const ScenarioConfig& cfg) {
  ResolvedScenario rs;
  rs.cfg = cfg;

  // Estimating a sector field is only well posed when every sector has at
  // least one sensor (the stacked selector matrix loses rank otherwise), so
  // sector coverage is as much a structural requirement as connectivity.
  const int want_m = cfg.sector_grid * cfg.sector_grid;
  auto sectors_covered = [&](const Graph& g) {
    if (cfg.sector_grid == 1) return true;
    std::vector<int> sec = sector_assignment(g.positions, cfg.graph.side, cfg.sector_grid);
    std::vector<char> seen(want_m, 0);
    for (int s : sec) seen[s] = 1;
    return std::find(seen.begin(), seen.end(), 0) == seen.end();
  };

  if (cfg.graph.type == "geometric") {
    if (cfg.graph.n < 1) throw ConfigError("graph.n: must be >= 1");
    if (cfg.graph.side <= 0 || cfg.graph.radius <= 0)
      throw ConfigError("graph: side and radius must be positive");
    uint64_t seed = cfg.graph.seed;
    bool ok = false;
    for (int attempt = 0; attempt <= cfg.graph.retry_cap; ++attempt, ++seed) {
      rs.graph = random_geometric_graph(cfg.graph.n, cfg.graph.side, cfg.graph.radius, seed);
      if ((!cfg.graph.require_connected || is_connected(rs.graph)) &&
          sectors_covered(rs.graph)) {
        ok = true;
        break;
      }
    }
    if (!ok)
      throw RunError("graph: no connected geometric graph covering every sector "
                     "within " +
                     std::to_string(cfg.graph.retry_cap + 1) + " seeds starting at " +
                     std::to_string(cfg.graph.seed) +
                     "; increase radius/n or the retry cap");
    if (seed != cfg.graph.seed)
      rs.warnings.push_back("graph seed advanced to " + std::to_string(seed) +
                            " for a connected, sector-covering graph");
    rs.cfg.graph.seed = seed;  // echo the seed that actually produced the graph
  } else {
    rs.graph = read_graph_csv(
        cfg.graph.edges_file,
        cfg.graph.positions_file.empty()
            ? std::nullopt
            : std::optional<std::filesystem::path>(cfg.graph.positions_file));
    if (cfg.graph.require_connected && !is_connected(rs.graph))
      throw ConfigError("graph: file graph is not connected");
  }

  rs.adjacency = rs.graph.adjacency();
  rs.m = cfg.sector_grid * cfg.sector_grid;
  if (cfg.sector_grid == 1) {
    rs.sector_of.assign(rs.graph.node_count, 0);
  } else {
    if (!rs.graph.has_positions())
      throw ConfigError(
          "graph: sector assignment needs node positions (provide a positions file or "
          "use a geometric graph)");
    rs.sector_of = sector_assignment(rs.graph.positions, cfg.graph.side, cfg.sector_grid);
    std::vector<char> seen(rs.m, 0);
    for (int s : rs.sector_of) seen[s] = 1;
    for (int s = 0; s < rs.m; ++s)
      if (!seen[s])
        throw ConfigError("graph: sector " + std::to_string(s) +
                          " has no sensor, so the field is not observable");
  }
  rs.meas = sector_selector_spec(rs.m, rs.sector_of, cfg.noise_variance);
  rs.eta = cfg.eta ? *cfg.eta
                   : std::sqrt(static_cast<double>(rs.m)) *
                         std::max(std::abs(cfg.field_low), std::abs(cfg.field_high));
  rs.center = cfg.attack.center_sector >= 0 ? cfg.attack.center_sector
                                            : center_sector(cfg.sector_grid);
  if (rs.center >= rs.m) throw ConfigError("attack.center_sector: out of range");

  if (cfg.gains.auto_mode) {
    GainChoice gc = choose_gains(rs.graph, rs.meas.h);
    rs.cfg.gains.auto_mode = false;
    rs.cfg.gains.alpha = gc.alpha;
    rs.cfg.gains.beta = gc.beta;
    rs.cfg.gains.r1 = gc.r1;
    rs.cfg.gains.derived_by = "auto";
    rs.spectral_radius = gc.spectral_radius;
    log_info("gain search: alpha=" + std::to_string(gc.alpha) +
             " beta=" + std::to_string(gc.beta) + " r1=" + std::to_string(gc.r1) +
             " rho=" + std::to_string(gc.spectral_radius));
  } else {
    rs.spectral_radius = error_dynamics_spectral_radius(rs.graph, rs.meas.h,
                                                        cfg.gains.alpha, cfg.gains.beta);
    if (rs.spectral_radius >= 1.0) {
      std::string w = "manual gains give error-dynamics spectral radius " +
                      std::to_string(rs.spectral_radius) +
                      " >= 1: estimates may not converge";
      rs.warnings.push_back(w);
      log_warn(w);
    }
  }

  // attack validation that doesn't depend on the trial
  const auto& atk = rs.cfg.attack;
  if (atk.mode == "strong" || atk.mode == "weak") {
    int in_sector = 0;
    for (int s : rs.sector_of) in_sector += (s == rs.center);
    if (in_sector == 0) {
      rs.warnings.push_back("attack: no sensor lies in sector " +
                            std::to_string(rs.center) + "; the attack set is empty");
      log_warn(rs.warnings.back());
    }
    if (atk.mode == "strong" && in_sector == rs.graph.node_count)
      throw ConfigError("attack: every node would be compromised");
  } else if (atk.mode == "custom") {
    int offenders = 0;
    for (const auto& [node, strategy] : atk.custom.agents) {
      if (node < 0 || node >= rs.graph.node_count)
        throw ConfigError("attack.agents: node " + std::to_string(node) + " out of range");
      if (const auto* cb = std::get_if<ConstantBroadcast>(&strategy)) {
        if (cb->value.size() != rs.m)
          throw ConfigError("attack.agents: constant value dimension != " +
                            std::to_string(rs.m));
      } else if (const auto* sb = std::get_if<StealthyBias>(&strategy)) {
        if (sb->component < 0 || sb->component >= rs.m)
          throw ConfigError("attack.agents: stealthy component out of range");
      } else if (const auto* mo = std::get_if<MeasurementOffset>(&strategy)) {
        if (mo->offset.size() != rs.meas.h[node].rows())
          throw ConfigError("attack.agents: offset dimension mismatch at node " +
                            std::to_string(node));
      }
      offenders++;
    }
    if (offenders >= rs.graph.node_count)
      throw ConfigError("attack: every node would be compromised");
  }
  return rs;
}

// ---------------------------------------------------------------------------
// simulation

namespace {

struct RoundContext {
  const ResolvedScenario* rs;
  uint64_t trial_seed;
  Eigen::VectorXd theta;
  double rho_safety;

  // estimator state (column n = agent n)
  Eigen::MatrixXd x, x_next, bcast;
  std::vector<Eigen::VectorXd> ybar;
  std::vector<char> flags;
  std::vector<long> flag_time;
  double gamma;

  // roles
  std::vector<char> is_byz;      // broadcast attacker
  std::vector<char> is_comp;     // any compromised agent
  std::vector<const AttackStrategy*> strategy;  // per node or null
  std::vector<int> byz_nodes, honest_nodes;
};

// Measurement + running average for one estimator-running agent.
void agent_measure(RoundContext& c, long t, int n) {
  Eigen::VectorXd y =
      measure(c.rs->meas, n, c.theta, c.trial_seed, static_cast<uint32_t>(t));
  if (c.strategy[n]) {
    if (const auto* mo = std::get_if<MeasurementOffset>(c.strategy[n]))
      y = falsify_measurement(y, mo->offset);
  }
  if (t == 0)
    c.ybar[n] = y;
  else
    c.ybar[n] = update_running_average(c.ybar[n], y, t);
}

// Detection + state update for one estimator-running agent. Reads x and
// bcast, writes x_next, flags, flag_time.
void agent_flags_and_update(RoundContext& c, long t, int n) {
  const auto& nbrs = c.rs->adjacency[n];
  const double g2 = c.gamma * c.gamma;
  if (!c.flags[n]) {
    for (int l : nbrs) {
      if ((c.x.col(n) - c.bcast.col(l)).squaredNorm() > g2) {
        c.flags[n] = 1;
        c.flag_time[n] = t;
        break;
      }
    }
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(c.rs->m);
  for (int l : nbrs) sum += c.bcast.col(l);
  c.x_next.col(n) = consensus_innovations_core(
      c.x.col(n), sum, static_cast<int>(nbrs.size()), c.ybar[n], c.rs->meas.h[n],
      c.rs->cfg.gains.alpha, c.rs->cfg.gains.beta);
}

}  // namespace

std::string classify_outcome(bool any_flag, double max_final_rel_error,
                             double threshold) {
  if (any_flag) return "Detected";
  if (max_final_rel_error < threshold) return "Converged";
  return "MissedAndWrong";
}

ScenarioResult run_scenario(const ResolvedScenario& rs, uint64_t trial_seed,
                            const RunOptions& opt) {
  const auto wall_start = std::chrono::steady_clock::now();
  const int n = rs.graph.node_count;
  const int m = rs.m;
  const long horizon = rs.cfg.horizon;
  const bool parallel = opt.parallel.value_or(rs.cfg.kernel == "parallel");

  ScenarioResult result;
  Parameter param =
      sample_parameter(m, rs.cfg.field_low, rs.cfg.field_high, trial_seed);
  result.theta = param.theta;

  // Materialize the attack for this trial.
  AttackSpec attack;
  if (rs.cfg.attack.mode == "strong")
    attack = scenario_strong(rs.sector_of, rs.center, rs.cfg.attack.pin_factor);
  else if (rs.cfg.attack.mode == "weak")
    attack = scenario_weak(rs.graph, rs.meas.h, rs.sector_of, rs.center,
                           rs.cfg.attack.pin_factor, trial_seed, rs.cfg.attack.retry_cap);
  else if (rs.cfg.attack.mode == "custom")
    attack = rs.cfg.attack.custom;
  attack = resolve_pins(attack, result.theta);

  RoundContext c;
  c.rs = &rs;
  c.trial_seed = trial_seed;
  c.theta = result.theta;
  c.rho_safety = rs.cfg.attack.rho_safety;
  c.x = Eigen::MatrixXd::Zero(m, n);
  if (rs.cfg.init_mode == "truth")
    for (int i = 0; i < n; ++i) c.x.col(i) = result.theta;
  c.x_next = c.x;
  c.bcast = Eigen::MatrixXd::Zero(m, n);
  c.ybar.assign(n, Eigen::VectorXd());
  c.flags.assign(n, 0);
  c.flag_time.assign(n, -1);
  c.gamma = initial_threshold(rs.eta, n);
  c.is_byz.assign(n, 0);
  c.is_comp.assign(n, 0);
  c.strategy.assign(n, nullptr);
  for (const auto& [node, strategy] : attack.agents) {
    c.is_comp[node] = 1;
    c.strategy[node] = &strategy;
    result.compromised.push_back(node);
    if (is_broadcast_attack(strategy)) {
      c.is_byz[node] = 1;
      c.byz_nodes.push_back(node);
    }
  }
  for (int i = 0; i < n; ++i)
    if (!c.is_comp[i]) c.honest_nodes.push_back(i);
  if (c.honest_nodes.empty()) throw ConfigError("attack: no uncompromised agents left");

  ThresholdParams tp;
  tp.alpha = rs.cfg.gains.alpha;
  tp.big_k = rs.cfg.big_k;
  tp.tau = rs.cfg.tau_decay;
  tp.r1 = rs.cfg.gains.r1;

  // Agents that run the estimator: everybody except broadcast attackers.
  std::vector<int> estimating;
  for (int i = 0; i < n; ++i)
    if (!c.is_byz[i]) estimating.push_back(i);
  const int n_est = static_cast<int>(estimating.size());
  const int n_honest = static_cast<int>(c.honest_nodes.size());

  // Trace bookkeeping: snapshot(t) = states/flags entering round t.
  std::vector<char> prev_flags = c.flags;
  auto record_snapshot = [&](long t) {
    for (int idx = 0; idx < n_honest; ++idx) {
      int node = c.honest_nodes[idx];
      result.trace.push_back(
          {t, node, (c.x.col(node) - c.theta).norm(), c.flags[node] ? 1 : 0});
    }
  };

  for (long t = 0; t < horizon; ++t) {
    if (t % rs.cfg.trace_stride == 0 || c.flags != prev_flags) record_snapshot(t);
    prev_flags = c.flags;

    // 1) sense + average (skipped by broadcast attackers: they don't estimate)
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (int idx = 0; idx < n_est; ++idx) agent_measure(c, t, estimating[idx]);
    } else {
      for (int idx = 0; idx < n_est; ++idx) agent_measure(c, t, estimating[idx]);
    }

    // 2) broadcasts: honest agents send their state, attackers send lies
    c.bcast = c.x;
    for (int b : c.byz_nodes) {
      std::vector<Eigen::VectorXd> visible;
      for (int l : rs.adjacency[b])
        if (!c.is_comp[l]) visible.push_back(c.x.col(l));
      c.bcast.col(b) =
          byzantine_broadcast(*c.strategy[b], visible, c.gamma, c.rho_safety, m,
                              trial_seed, static_cast<uint32_t>(b),
                              static_cast<uint32_t>(t));
      if (opt.record_broadcasts)
        result.broadcasts.push_back({t, b, c.bcast.col(b)});
    }

    // 3) detect + update
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (int idx = 0; idx < n_est; ++idx) agent_flags_and_update(c, t, estimating[idx]);
    } else {
      for (int idx = 0; idx < n_est; ++idx) agent_flags_and_update(c, t, estimating[idx]);
    }
    for (int b : c.byz_nodes) c.x_next.col(b) = c.x.col(b);
    c.x.swap(c.x_next);

    // 4) threshold decay
    c.gamma = threshold_step(c.gamma, t, tp);
  }
  record_snapshot(horizon);

  // summary
  RunSummary& s = result.summary;
  s.trial_seed = trial_seed;
  s.final_gamma = c.gamma;
  s.theta_norm = result.theta.norm();
  s.mean_snr_db = mean_snr_db(rs.meas, result.theta);
  s.compromised_count = static_cast<int>(result.compromised.size());
  result.flag_time = c.flag_time;
  result.final_error.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (int node : estimating) result.final_error[node] = (c.x.col(node) - c.theta).norm();

  s.first_flag_t = -1;
  s.max_final_error = 0;
  s.min_center_rel_error = std::numeric_limits<double>::infinity();
  double center_truth = std::abs(result.theta(rs.center));
  for (int node : c.honest_nodes) {
    if (c.flags[node]) {
      s.flagged_count++;
      s.any_flag = true;
      if (s.first_flag_t < 0 || c.flag_time[node] < s.first_flag_t)
        s.first_flag_t = c.flag_time[node];
    }
    s.max_final_error = std::max(s.max_final_error, result.final_error[node]);
    if (center_truth > 0) {
      double rel = std::abs(c.x(rs.center, node) - result.theta(rs.center)) / center_truth;
      s.min_center_rel_error = std::min(s.min_center_rel_error, rel);
    }
  }
  s.max_final_rel_error = s.theta_norm > 0 ? s.max_final_error / s.theta_norm
                                           : s.max_final_error;
  s.outcome =
      classify_outcome(s.any_flag, s.max_final_rel_error, rs.cfg.convergence_threshold);
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                 wall_start)
                       .count();
  return result;
}

McResult run_monte_carlo(const ResolvedScenario& rs,
                         const std::vector<uint64_t>& seeds, const RunOptions& opt) {
  if (seeds.empty()) throw ConfigError("monte carlo: no seeds given");
  McResult mc;
  for (uint64_t seed : seeds) {
    ScenarioResult r = run_scenario(rs, seed, opt);
    log_info("seed " + std::to_string(seed) + ": " + r.summary.outcome);
    mc.runs.push_back(r.summary);
  }
  return mc;
}

// ---------------------------------------------------------------------------
// outputs

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RunError("cannot create directory " + dir.string());
}

ordered_json summary_to_json(const RunSummary& s) {
  ordered_json j;
  j["trial_seed"] = s.trial_seed;
  j["outcome"] = s.outcome;
  j["any_flag"] = s.any_flag;
  j["first_flag_t"] = s.first_flag_t;
  j["max_final_error"] = s.max_final_error;
  j["max_final_rel_error"] = s.max_final_rel_error;
  j["min_center_rel_error"] = s.min_center_rel_error;
  j["final_gamma"] = s.final_gamma;
  j["theta_norm"] = s.theta_norm;
  j["mean_snr_db"] = s.mean_snr_db;
  j["wall_seconds"] = s.wall_seconds;
  j["flagged_count"] = s.flagged_count;
  j["compromised_count"] = s.compromised_count;
  return j;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  double pos = q * (static_cast<double>(v.size()) - 1);
  size_t lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1 - frac) + v[hi] * frac;
}

}  // namespace

void emit_config_echo(const ResolvedScenario& rs, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::ofstream out(out_dir / "config.json");
  if (!out) throw RunError("cannot write config echo in " + out_dir.string());
  out << config_to_json(rs.cfg).dump(2) << "\n";
}

void emit_run_outputs(const ResolvedScenario& rs, const ScenarioResult& result,
                      const std::filesystem::path& out_dir) {
  const auto run_dir = out_dir / ("run_" + std::to_string(result.summary.trial_seed));
  ensure_dir(run_dir);

  {
    std::ofstream out(run_dir / "trace.csv");
    if (!out) throw RunError("cannot write trace in " + run_dir.string());
    out << "t,node,error,flag\n";
    char buf[96];
    for (const auto& row : result.trace) {
      snprintf(buf, sizeof buf, "%ld,%d,%.17g,%d\n", row.t, row.node, row.error, row.flag);
      out << buf;
    }
  }
  {
    std::ofstream out(run_dir / "summary.csv");
    if (!out) throw RunError("cannot write summary in " + run_dir.string());
    out << "node,final_error,final_rel_error,flag,first_flag_t\n";
    char buf[128];
    double tn = result.summary.theta_norm;
    for (int node = 0; node < static_cast<int>(result.final_error.size()); ++node) {
      if (std::find(result.compromised.begin(), result.compromised.end(), node) !=
          result.compromised.end())
        continue;
      double err = result.final_error[node];
      snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d,%ld\n", node, err,
               tn > 0 ? err / tn : err, result.flag_time[node] >= 0 ? 1 : 0,
               result.flag_time[node]);
      out << buf;
    }
  }
  {
    ordered_json j = summary_to_json(result.summary);
    j["compromised"] = result.compromised;
    j["warnings"] = rs.warnings;
    std::ofstream out(run_dir / "run.json");
    out << j.dump(2) << "\n";
  }

  // error quantiles + detection threshold over time
  {
    std::map<long, std::vector<double>> by_t;
    for (const auto& row : result.trace) by_t[row.t].push_back(row.error);
    PlotSeries smax{"max error", "#c0392b", {}}, smed{"median error", "#2471a3", {}},
        smin{"min error", "#1e8449", {}}, sgam{"threshold", "#7d3c98", {}};
    for (auto& [t, errs] : by_t) {
      std::sort(errs.begin(), errs.end());
      smin.points.push_back({static_cast<double>(t), errs.front()});
      smed.points.push_back({static_cast<double>(t), errs[errs.size() / 2]});
      smax.points.push_back({static_cast<double>(t), errs.back()});
    }
    ThresholdParams tp{rs.cfg.gains.alpha, rs.cfg.big_k, rs.cfg.tau_decay,
                       rs.cfg.gains.r1};
    double gamma = initial_threshold(rs.eta, rs.graph.node_count);
    for (long t = 0; t <= rs.cfg.horizon; ++t) {
      if (by_t.count(t)) sgam.points.push_back({static_cast<double>(t), gamma});
      if (t < rs.cfg.horizon) gamma = threshold_step(gamma, t, tp);
    }
    PlotOptions opt;
    opt.title = "estimation error and detection threshold";
    opt.x_label = "round";
    opt.y_label = "error (log)";
    opt.log_y = true;
    write_svg_chart(run_dir / "error_plot.svg", {smax, smed, smin, sgam}, opt);
  }
  {
    std::map<long, std::pair<int, int>> by_t;  // t -> (flagged, total)
    for (const auto& row : result.trace) {
      auto& cell = by_t[row.t];
      cell.first += row.flag;
      cell.second++;
    }
    PlotSeries s{"flagged fraction", "#c0392b", {}};
    for (auto& [t, cell] : by_t)
      s.points.push_back(
          {static_cast<double>(t),
           cell.second ? static_cast<double>(cell.first) / cell.second : 0.0});
    PlotOptions opt;
    opt.title = "fraction of honest agents with a raised flag";
    opt.x_label = "round";
    opt.y_label = "fraction";
    write_svg_chart(run_dir / "flag_plot.svg", {s}, opt);
  }
}

void emit_mc_outputs(const McResult& mc, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  {
    std::ofstream out(out_dir / "mc_summary.csv");
    if (!out) throw RunError("cannot write mc_summary in " + out_dir.string());
    out << "seed,outcome,any_flag,first_flag_t,max_final_rel_error,min_center_rel_error,"
           "final_gamma,mean_snr_db,wall_seconds\n";
    char buf[256];
    for (const auto& r : mc.runs) {
      snprintf(buf, sizeof buf, "%llu,%s,%d,%ld,%.17g,%.17g,%.17g,%.17g,%.3f\n",
               static_cast<unsigned long long>(r.trial_seed), r.outcome.c_str(),
               r.any_flag ? 1 : 0, r.first_flag_t, r.max_final_rel_error,
               r.min_center_rel_error, r.final_gamma, r.mean_snr_db, r.wall_seconds);
      out << buf;
    }
  }
  {
    int converged = 0, detected = 0, missed = 0;
    std::vector<double> errs;
    std::vector<double> flag_times;
    double mean_snr = 0;
    for (const auto& r : mc.runs) {
      converged += r.outcome == "Converged";
      detected += r.outcome == "Detected";
      missed += r.outcome == "MissedAndWrong";
      errs.push_back(r.max_final_rel_error);
      if (r.first_flag_t >= 0) flag_times.push_back(static_cast<double>(r.first_flag_t));
      mean_snr += r.mean_snr_db;
    }
    mean_snr /= static_cast<double>(mc.runs.size());
    double mean_flag_t = -1;
    if (!flag_times.empty()) {
      mean_flag_t = 0;
      for (double v : flag_times) mean_flag_t += v;
      mean_flag_t /= static_cast<double>(flag_times.size());
    }
    std::ofstream out(out_dir / "mc_aggregate.csv");
    if (!out) throw RunError("cannot write mc_aggregate in " + out_dir.string());
    out << "runs,converged,detected,missed_and_wrong,mean_first_flag_t,"
           "rel_error_q10,rel_error_q50,rel_error_q90,mean_snr_db\n";
    char buf[256];
    snprintf(buf, sizeof buf, "%zu,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
             mc.runs.size(), converged, detected, missed, mean_flag_t,
             quantile(errs, 0.1), quantile(errs, 0.5), quantile(errs, 0.9), mean_snr);
    out << buf;
  }
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv(path, true);
  if (table.header != std::vector<std::string>{"t", "node", "error", "flag"})
    throw ConfigError(path.string() + ": unexpected trace header");
  std::vector<TraceRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    if (r.size() != 4) throw ConfigError(path.string() + ": bad trace row");
    TraceRow row;
    row.t = static_cast<long>(parse_double(r[0], path.string()));
    row.node = static_cast<int>(parse_double(r[1], path.string()));
    row.error = parse_double(r[2], path.string());
    row.flag = static_cast<int>(parse_double(r[3], path.string()));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sentinet
