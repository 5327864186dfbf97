#pragma once
// End-to-end scenario harness: JSON config -> resolved scenario (graph,
// sectors, gains) -> per-trial simulation rounds -> outcome classification,
// Monte Carlo aggregation, and file outputs (CSV traces, summaries, SVG
// plots, and a replayable config echo).

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentinet/adversary.hpp"
#include "sentinet/graph.hpp"
#include "sentinet/measurement.hpp"

namespace sentinet {

struct GraphConfig {
  std::string type = "geometric";  // "geometric" | "file"
  int n = 50;
  double side = 2000.0;
  double radius = 632.0;
  uint64_t seed = 1;
  bool require_connected = true;
  int retry_cap = 100;
  std::string edges_file;      // type == "file"
  std::string positions_file;  // optional for file graphs
};

struct GainConfig {
  bool auto_mode = true;
  double alpha = 0.0, beta = 0.0, r1 = 0.0;
  // "auto" when the values were materialized by the gain search (kept in the
  // config echo so replays skip the search but stay attributable).
  std::string derived_by;
};

struct AttackConfig {
  std::string mode = "none";  // none | strong | weak | custom
  double pin_factor = 1.5;
  double rho_safety = 0.9;
  int center_sector = -1;  // -1: the grid's middle cell
  int retry_cap = 200;     // weak-mode resampling budget
  AttackSpec custom;       // mode == "custom"
};

struct ScenarioConfig {
  int schema_version = 1;
  GraphConfig graph;
  int sector_grid = 3;
  double field_low = 0.0;
  double field_high = 160.0;
  double noise_variance = 170.0;
  std::optional<double> eta;  // default sqrt(m) * max(|low|, |high|)
  GainConfig gains;
  double big_k = 40.0;
  double tau_decay = 0.45;
  AttackConfig attack;
  long horizon = 20000;
  std::vector<uint64_t> trial_seeds{1};
  double convergence_threshold = 0.05;
  long trace_stride = 50;
  std::string init_mode = "zero";   // zero | truth
  std::string kernel = "parallel";  // parallel | serial
};

ScenarioConfig config_from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);

struct ResolvedScenario {
  ScenarioConfig cfg;  // with gains materialized and the graph seed that won
  Graph graph;
  std::vector<std::vector<int>> adjacency;
  std::vector<int> sector_of;
  MeasurementSpec meas;
  int m = 0;
  double eta = 0.0;
  int center = 0;
  double spectral_radius = 0.0;  // of the error dynamics at the chosen gains
  std::vector<std::string> warnings;
};

// Builds/loads the graph (retrying seeds for connectivity when required),
// derives sectors and measurement spec, materializes gains (search or
// validated manual values), and validates the attack section.
ResolvedScenario resolve_scenario(const ScenarioConfig& cfg);

struct TraceRow {
  long t = 0;
  int node = 0;
  double error = 0.0;  // |x_n(t) - theta|
  int flag = 0;
};

struct RunSummary {
  uint64_t trial_seed = 0;
  std::string outcome;  // Detected | Converged | MissedAndWrong
  bool any_flag = false;
  long first_flag_t = -1;
  double max_final_error = 0.0;
  double max_final_rel_error = 0.0;
  double min_center_rel_error = 0.0;
  double final_gamma = 0.0;
  double theta_norm = 0.0;
  double mean_snr_db = 0.0;
  double wall_seconds = 0.0;
  int flagged_count = 0;
  int compromised_count = 0;
};

struct BroadcastRecord {
  long t = 0;
  int node = 0;
  Eigen::VectorXd value;
};

struct RunOptions {
  std::optional<bool> parallel;    // default: config kernel field
  bool record_broadcasts = false;  // keep every byzantine broadcast (tests)
};

struct ScenarioResult {
  RunSummary summary;
  std::vector<TraceRow> trace;
  Eigen::VectorXd theta;
  std::vector<int> compromised;   // ascending
  std::vector<long> flag_time;    // per node; -1 = never (or compromised)
  std::vector<double> final_error;  // per node; NaN for broadcast attackers
  std::vector<BroadcastRecord> broadcasts;
};

ScenarioResult run_scenario(const ResolvedScenario& rs, uint64_t trial_seed,
                            const RunOptions& opt = {});

struct McResult {
  std::vector<RunSummary> runs;
};
McResult run_monte_carlo(const ResolvedScenario& rs,
                         const std::vector<uint64_t>& seeds,
                         const RunOptions& opt = {});

// Outcome precedence: Detected beats Converged beats MissedAndWrong.
std::string classify_outcome(bool any_flag, double max_final_rel_error,
                             double threshold);

// out_dir/config.json - the exact resolved config; replaying it reproduces
// every trace byte for byte.
void emit_config_echo(const ResolvedScenario& rs, const std::filesystem::path& out_dir);
// out_dir/run_<seed>/{trace.csv, summary.csv, run.json, error_plot.svg,
// flag_plot.svg}
void emit_run_outputs(const ResolvedScenario& rs, const ScenarioResult& result,
                      const std::filesystem::path& out_dir);
// out_dir/{mc_summary.csv, mc_aggregate.csv}
void emit_mc_outputs(const McResult& mc, const std::filesystem::path& out_dir);

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

}  // namespace sentinet
