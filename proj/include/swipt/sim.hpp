#pragma once
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swipt/baselines.hpp"

namespace swipt {

enum class Algorithm { ProposedContinuous, ProposedDiscrete, Baseline1, Baseline2 };
std::string algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

struct DrawResult {
  uint64_t seed = 0;
  Algorithm algorithm = Algorithm::ProposedContinuous;
  bool feasible = false;
  bool solver_error = false;  // threw instead of returning a report
  Metrics metrics;
  int iterations = 0;
};

struct PointSummary {
  int n_draws = 0;
  int n_feasible = 0;
  int n_errors = 0;
  bool failed = false;  // the whole point was abandoned (setup error)
  // Means over all draws; infeasible draws contribute zeros, so these are
  // never above the feasible-only averages.
  double capacity_bps = 0.0;
  double power_w = 0.0;
  double efficiency_bpj = 0.0;
  double harvested_w_total = 0.0;
  std::vector<DrawResult> draws;
};

// Monte Carlo at one parameter point: derive_seed(master, j) per draw,
// threads split the draw range, results land in draw order.
PointSummary run_point(const SystemConfig& cfg, Algorithm alg, int n_draws,
                       uint64_t master_seed, int jobs);

struct SweepSpec {
  std::string parameter;          // config field swept, e.g. "p_max_dbm"
  std::vector<double> values;
  std::vector<Algorithm> algorithms;
  int n_draws = 500;
  int jobs = 1;
};

// Apply one sweep value to a copy of the base config.
SystemConfig apply_sweep_value(const SystemConfig& base, const std::string& parameter,
                               double value);

struct SweepResult {
  SweepSpec spec;
  // point_summaries[value_index][algorithm_index]
  std::vector<std::vector<PointSummary>> points;
};
// on_row, when set, sees each (value, algorithm, summary) as soon as the
// point finishes; a point that throws is flagged failed, not fatal.
SweepResult run_sweep(const SystemConfig& base, const SweepSpec& spec, uint64_t master_seed,
                      const std::function<void(double, Algorithm, const PointSummary&)>&
                          on_row = {});

// One outer-iteration trace row for convergence plots. bound_ratio is the
// iterate's ratio against the converged value, q / q_final.
struct TraceRow {
  int iteration = 0;
  double q_bpj = 0.0;
  double q_original_bpj = 0.0;
  double bound_ratio = 0.0;
  double dual_residual = 0.0;
  std::string mode_e;  // semicolon-joined selected energy levels (discrete only)
};
std::vector<TraceRow> convergence_trace(const SolveReport& rep);
std::vector<TraceRow> convergence_trace(const DiscreteSolveReport& rep);
// Solve-and-trace convenience for one realization.
std::vector<TraceRow> convergence_trace(const SystemConfig& cfg, const ChannelRealization& ch);

// Named parameter presets for the standard experiment figures.
struct Preset {
  SystemConfig config;
  SweepSpec sweep;        // empty parameter = single point
  std::string describe;
};
std::vector<std::string> preset_names();
std::optional<Preset> lookup_preset(const std::string& name);

}  // namespace swipt
