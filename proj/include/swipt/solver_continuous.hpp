#pragma once
#include <functional>
#include <string>
#include <vector>

#include "swipt/objective.hpp"

namespace swipt {

// Dual variables for the continuous-ratio problem. rho_e is optimized per
// (i,k) inside the subproblem; mu rows tie them back to a common value.
struct MultiplierState {
  double lambda = 0.0;  // total transmit power
  double beta = 0.0;    // power-grid draw
  double gamma = 0.0;   // sum-rate floor
  std::vector<double> upsilon;  // per delay-limited receiver rate floor (size K, zero off-set)
  std::vector<double> w;        // per-receiver harvested-power floor (size K)
  Grid delta;                   // n_F x K, split-sum cap
  Grid mu;                      // n_F x K, row 0 unused; consensus with row 0

  MultiplierState() : delta(0, 0), mu(0, 0) {}
  MultiplierState(int n_f, int k)
      : upsilon(k, 0.0), w(k, 0.0), delta(n_f, k), mu(n_f, k) {}
};

struct SolveReport {
  bool feasible = false;
  double q_bpj = 0.0;            // fixed point of the surrogate ratio
  double q_original_bpj = 0.0;   // true efficiency of the returned policy
  int outer_iterations = 0;
  std::vector<int> inner_iterations;    // dual iterations per outer pass
  std::vector<double> q_trajectory;     // surrogate ratio, starts at 0
  std::vector<double> q_original_trajectory;  // true efficiency of each iterate, starts at 0
  std::vector<double> dual_residual;    // final multiplier step size per outer pass
  std::string status;                   // "converged", "max_iterations", "infeasible"
  ContinuousPolicy policy;
  Metrics metrics;
};

// Subproblem pieces, exposed for tests.
// A_k = alpha_k + gamma + upsilon_k; Phi_i collects every power-linear price
// and is the same for all receivers on a subcarrier.
double price_a(const SystemConfig& cfg, const MultiplierState& m, int k);
double price_phi(const SystemConfig& cfg, const ChannelRealization& ch,
                 const MultiplierState& m, int i, double q);

// Water-filling closed forms. All apply [.]^+ then clamp into their boxes.
// phi <= 0 saturates the power at p_max_w (the dual ascent then reprices it).
double best_power_w(const SystemConfig& cfg, double a_k, double phi_i);
double best_rho_i(const SystemConfig& cfg, double a_k, double delta_ik, double sigma_bar_w);
// Row 0 balances the harvesting floor; other rows follow delta and mu only.
double best_rho_e_row0(double q, double w_k, double p_req_w, double delta_0k,
                       double mu_col_sum, double sigma_bar_w, double eta_k,
                       double rho_e_lo, double rho_e_hi);
double best_rho_e_row(double q, double eta_k, double sigma_bar_w, double delta_jk,
                      double mu_jk, double rho_e_lo, double rho_e_hi);

// Capacity surrogate used inside the dual updates: drops the +1 in the log.
// Returns -inf when the argument of the log is not positive.
double approx_rate_bps(double w_hz, double p_w, double g, double rho_i, double sigma_bar_w,
                       double sigma_proc_w);

// Per-(i,k) assignment score; the subcarrier goes to the argmax.
double assignment_metric(const SystemConfig& cfg, double a_k, double p_w, double g,
                         double rho_i, double sigma_bar_w);

struct InnerResult {
  ContinuousPolicy policy;     // raw subproblem output (rho_e still per-(i,k) snapped)
  Grid rho_e_rows;             // n_F x K before the consensus snap, for diagnostics
  MultiplierState multipliers;
  int iterations = 0;
  double final_step = 0.0;     // max relative multiplier change at exit
  double dual_value = 0.0;

  InnerResult() : rho_e_rows(0, 0) {}
};

// Full dual ascent at fixed q: closed forms, assignment, multiplier updates
// with per-family scaling and backtracking on the dual value.
InnerResult inner_solve(const SystemConfig& cfg, const ChannelRealization& ch,
                        double q, const MultiplierState& warm);

// Turn the relaxed subproblem output into a feasible point: snap rho_e to the
// row-0 value, re-box rho_i, then greedily repair any rate shortfall.
ContinuousPolicy extract_primal(const SystemConfig& cfg, const ChannelRealization& ch,
                                const InnerResult& inner);

// Approximated objective pair at a policy: capacity without the +1 in the
// log, supply with the harvest rebate taken at full splitting. These drive
// the ratio updates; reported metrics always use the exact pair.
struct SurrogatePair {
  double u_hat = 0.0;     // bits/s
  double u_tp_hat = 0.0;  // watts
};
SurrogatePair surrogate_pair(const SystemConfig& cfg, const ChannelRealization& ch,
                             const ContinuousPolicy& pol);

// Ratio-maximization outer loop over a caller-supplied inner oracle.
// Returns the fixed point of num/den; used directly by both solvers and by
// scalar tests. num/den are evaluated at the inner solution for the given q.
struct RatioStep {
  double num = 0.0;
  double den = 0.0;
};
struct RatioResult {
  double q = 0.0;
  int iterations = 0;
  std::vector<double> trajectory;  // starts at 0
  bool converged = false;
};
RatioResult maximize_ratio(const std::function<RatioStep(double)>& inner,
                           const DinkelbachOptions& opt);

SolveReport solve_continuous(const SystemConfig& cfg, const ChannelRealization& ch);

// Structural audit of a finished report: trajectory monotone from 0, metrics
// consistent with the policy, Boolean assignment rows, feasibility flag
// matching the constraint check, zeroed metrics on infeasible runs. Returns
// one message per violated rule; empty means the report is sound.
std::vector<std::string> check_report(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const SolveReport& rep);

}  // namespace swipt
