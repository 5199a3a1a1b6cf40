#include "swipt/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "swipt/channel.hpp"

namespace swipt {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::ProposedContinuous: return "continuous";
    case Algorithm::ProposedDiscrete: return "discrete";
    case Algorithm::Baseline1: return "baseline1";
    case Algorithm::Baseline2: return "baseline2";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  if (name == "continuous") return Algorithm::ProposedContinuous;
  if (name == "discrete") return Algorithm::ProposedDiscrete;
  if (name == "baseline1") return Algorithm::Baseline1;
  if (name == "baseline2") return Algorithm::Baseline2;
  return std::nullopt;
}

namespace {

DrawResult solve_one(const SystemConfig& cfg, Algorithm alg, uint64_t seed) {
  DrawResult d;
  d.seed = seed;
  d.algorithm = alg;
  try {
    ChannelRealization ch = generate_realization(cfg, seed);
    switch (alg) {
      case Algorithm::ProposedContinuous: {
        SolveReport r = solve_continuous(cfg, ch);
        d.feasible = r.feasible;
        d.metrics = r.metrics;
        d.iterations = r.outer_iterations;
        break;
      }
      case Algorithm::ProposedDiscrete: {
        DiscreteSolveReport r = solve_discrete(cfg, ch);
        d.feasible = r.feasible;
        d.metrics = r.metrics;
        d.iterations = r.outer_iterations;
        break;
      }
      case Algorithm::Baseline1: {
        DiscreteSolveReport r = baseline_capacity(cfg, ch);
        d.feasible = r.feasible;
        d.metrics = r.metrics;
        d.iterations = r.outer_iterations;
        break;
      }
      case Algorithm::Baseline2: {
        SolveReport r = baseline_no_harvest(cfg, ch);
        d.feasible = r.feasible;
        d.metrics = r.metrics;
        d.iterations = r.outer_iterations;
        break;
      }
    }
  } catch (...) {
    d.solver_error = true;
    d.feasible = false;
    d.metrics = Metrics{};
  }
  return d;
}

// compensated summation so the averaging order cannot shift the result
struct Kahan {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

PointSummary run_point(const SystemConfig& cfg, Algorithm alg, int n_draws,
                       uint64_t master_seed, int jobs) {
  PointSummary out;
  out.n_draws = std::max(n_draws, 0);
  if (out.n_draws == 0) return out;
  out.draws.resize(out.n_draws);

  int threads = std::clamp(jobs, 1, out.n_draws);
  if (threads == 1) {
    for (int j = 0; j < out.n_draws; ++j)
      out.draws[j] = solve_one(cfg, alg, derive_seed(master_seed, (uint64_t)j));
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&]() {
        for (;;) {
          int j = next.fetch_add(1);
          if (j >= out.n_draws) return;
          out.draws[j] = solve_one(cfg, alg, derive_seed(master_seed, (uint64_t)j));
        }
      });
    for (auto& th : pool) th.join();
  }

  // failure convention: infeasible draws stay in the denominator as zeros
  Kahan cap, pow, eff, har;
  for (const DrawResult& d : out.draws) {
    if (d.solver_error) ++out.n_errors;
    if (!d.feasible) continue;
    ++out.n_feasible;
    cap.add(d.metrics.capacity_bps);
    pow.add(d.metrics.supply_power_w);
    eff.add(d.metrics.efficiency_bpj);
    har.add(d.metrics.harvested_w_total);
  }
  out.capacity_bps = cap.sum / out.n_draws;
  out.power_w = pow.sum / out.n_draws;
  out.efficiency_bpj = eff.sum / out.n_draws;
  out.harvested_w_total = har.sum / out.n_draws;
  return out;
}

SystemConfig apply_sweep_value(const SystemConfig& base, const std::string& parameter,
                               double value) {
  SystemConfig cfg = base;
  if (parameter == "p_max_dbm") {
    cfg.p_max_w = dbm_to_watt(value);
  } else if (parameter == "sigma_int_dbm") {
    cfg.sigma_int_w = dbm_to_watt(value);
  } else if (parameter == "p_cr_dbm") {
    cfg.p_cr_w = dbm_to_watt(value);
  } else if (parameter == "iteration_cap") {
    cfg.dinkelbach.max_iterations = std::max(1, (int)std::lround(value));
  } else if (parameter == "K") {
    int k = std::max(1, (int)std::lround(value));
    cfg.n_receivers = k;
    auto pad = [k](std::vector<double>& v, double fill) {
      if (v.empty())
        v.assign(k, fill);
      else
        v.resize(k, v.back());
    };
    pad(cfg.eta, 0.8);
    pad(cfg.alpha, 1.0);
    pad(cfg.r_min_k_bps, 0.0);
    pad(cfg.p_req_w, 0.0);
    pad(cfg.los_gain, 1.0);
    std::vector<int> kept;
    for (int d : cfg.delay_set)
      if (d < k) kept.push_back(d);
    cfg.delay_set = kept;
  } else {
    throw std::invalid_argument("unknown sweep parameter: " + parameter);
  }
  return cfg;
}

SweepResult run_sweep(const SystemConfig& base, const SweepSpec& spec, uint64_t master_seed,
                      const std::function<void(double, Algorithm, const PointSummary&)>& on_row) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (spec.algorithms.empty()) throw std::invalid_argument("sweep needs at least one algorithm");
  if (spec.n_draws < 1) throw std::invalid_argument("sweep needs at least one draw per point");

  SweepResult out;
  out.spec = spec;
  out.points.resize(spec.values.size());
  for (size_t vi = 0; vi < spec.values.size(); ++vi) {
    out.points[vi].resize(spec.algorithms.size());
    for (size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
      PointSummary ps;
      try {
        SystemConfig cfg = apply_sweep_value(base, spec.parameter, spec.values[vi]);
        // same master seed at every point: draw j sees the same channel across
        // values and algorithms, so curves compare under common randomness
        ps = run_point(cfg, spec.algorithms[ai], spec.n_draws, master_seed, spec.jobs);
      } catch (...) {
        ps = PointSummary{};
        ps.n_draws = spec.n_draws;
        ps.failed = true;
      }
      out.points[vi][ai] = ps;
      if (on_row) on_row(spec.values[vi], spec.algorithms[ai], out.points[vi][ai]);
    }
  }
  return out;
}

namespace {

// Shared body: the upper bound q_upper is the converged surrogate ratio, the
// value the dashed reference lines sit at. Row j pairs trajectory entry j with
// the dual residual of the pass that produced it (entry 0 predates any pass).
template <typename Report>
std::vector<TraceRow> trace_rows(const Report& rep, const std::vector<std::string>* modes) {
  std::vector<TraceRow> rows;
  double q_upper = rep.q_trajectory.empty() ? 0.0 : rep.q_trajectory.back();
  for (size_t j = 0; j < rep.q_trajectory.size(); ++j) {
    TraceRow r;
    r.iteration = (int)j;
    r.q_bpj = rep.q_trajectory[j];
    if (j < rep.q_original_trajectory.size()) r.q_original_bpj = rep.q_original_trajectory[j];
    r.bound_ratio = q_upper > 0.0 ? rep.q_trajectory[j] / q_upper : 0.0;
    if (j >= 1 && j - 1 < rep.dual_residual.size()) r.dual_residual = rep.dual_residual[j - 1];
    if (modes && j >= 1 && j - 1 < modes->size()) r.mode_e = (*modes)[j - 1];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

std::vector<TraceRow> convergence_trace(const SolveReport& rep) {
  return trace_rows(rep, nullptr);
}

std::vector<TraceRow> convergence_trace(const DiscreteSolveReport& rep) {
  return trace_rows(rep, &rep.mode_e_trajectory);
}

std::vector<TraceRow> convergence_trace(const SystemConfig& cfg, const ChannelRealization& ch) {
  return convergence_trace(solve_continuous(cfg, ch));
}

namespace {

std::vector<double> range_steps(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
  return v;
}

const std::vector<Algorithm> kAllAlgorithms = {
    Algorithm::ProposedContinuous, Algorithm::ProposedDiscrete, Algorithm::Baseline1,
    Algorithm::Baseline2};

Preset make_fig2() {
  Preset p;
  p.config = desk_config();
  p.config.p_max_w = dbm_to_watt(30.0);
  p.sweep.parameter = "sigma_int_dbm";
  p.sweep.values = {-70.0, -55.0, -40.0};
  p.sweep.algorithms = {Algorithm::ProposedContinuous};
  p.sweep.n_draws = 1;
  p.describe = "convergence trace per interference level, P_max 30 dBm, K=3";
  return p;
}

Preset make_fig3() {
  Preset p;
  p.config = desk_config();
  p.sweep.parameter = "p_max_dbm";
  p.sweep.values = range_steps(10.0, 30.0, 2.0);
  p.sweep.algorithms = kAllAlgorithms;
  p.sweep.n_draws = 500;
  p.describe = "averaged efficiency vs transmit power cap, all algorithms, moderate interference";
  return p;
}

Preset make_fig4() {
  Preset p;
  p.config = desk_config();
  p.config.p_max_w = dbm_to_watt(25.0);
  p.sweep.parameter = "K";
  p.sweep.values = {1, 2, 3, 4, 5, 6};
  p.sweep.algorithms = {Algorithm::ProposedDiscrete, Algorithm::Baseline2};
  p.sweep.n_draws = 500;
  p.describe = "efficiency vs receiver count at P_max 25 dBm, discrete vs no-harvest baseline";
  return p;
}

Preset make_fig5() {
  Preset p = make_fig3();
  p.describe = "averaged capacity vs transmit power cap, all algorithms (capacity view)";
  return p;
}

Preset make_fig6() {
  Preset p;
  p.config = desk_config();
  p.sweep.parameter = "p_max_dbm";
  p.sweep.values = range_steps(10.0, 30.0, 2.0);
  p.sweep.algorithms = {Algorithm::ProposedDiscrete};
  p.sweep.n_draws = 500;
  p.describe = "harvested power vs transmit power cap, discrete splitting";
  return p;
}

Preset make_fig7() {
  Preset p;
  p.config = desk_config();
  p.config.p_max_w = dbm_to_watt(18.0);
  p.sweep.parameter = "K";
  p.sweep.values = {1, 2, 3, 4, 5, 6};
  p.sweep.algorithms = {Algorithm::ProposedDiscrete};
  p.sweep.n_draws = 500;
  p.describe = "efficiency and capacity vs receiver count at P_max 18 dBm, P_CR 20 dBm";
  return p;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
}

std::optional<Preset> lookup_preset(const std::string& name) {
  if (name == "fig2") return make_fig2();
  if (name == "fig3") return make_fig3();
  if (name == "fig4") return make_fig4();
  if (name == "fig5") return make_fig5();
  if (name == "fig6") return make_fig6();
  if (name == "fig7") return make_fig7();
  return std::nullopt;
}

}  // namespace swipt
