#pragma once
#include "swipt/solver_continuous.hpp"

namespace swipt {

// Dual variables for the mode-indexed problem. kappa prices the energy-mode
// coupling per (i,k); delta keeps its continuous meaning per information mode.
struct DiscreteMultiplierState {
  double lambda = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::vector<double> upsilon;  // size K
  Grid w;                       // K x N, harvesting floor per energy mode
  Grid3 delta;                  // n_F x K x N, per information mode
  Grid3 kappa;                  // n_F x K x N, per energy mode

  DiscreteMultiplierState() : w(0, 0), delta(0, 0, 0), kappa(0, 0, 0) {}
  DiscreteMultiplierState(int n_f, int k, int n)
      : upsilon(k, 0.0), w(k, n), delta(n_f, k, n), kappa(n_f, k, n) {}
};

struct DiscreteSolveReport {
  bool feasible = false;
  double q_bpj = 0.0;
  double q_original_bpj = 0.0;
  int outer_iterations = 0;
  std::vector<int> inner_iterations;
  std::vector<double> q_trajectory;
  std::vector<double> q_original_trajectory;
  std::vector<double> dual_residual;
  std::vector<std::string> mode_e_trajectory;  // selected energy levels per pass
  std::string status;
  DiscretePolicy policy;
  Metrics metrics;
};

struct DiscreteInnerResult {
  DiscretePolicy policy;
  DiscreteMultiplierState multipliers;
  int iterations = 0;
  double final_step = 0.0;
  double dual_value = 0.0;
};

// Energy-mode score for receiver k picking level b; the argmax is selected.
double energy_mode_score(const SystemConfig& cfg, const ChannelRealization& ch,
                         const DiscreteMultiplierState& m, int k, int b, double q);

DiscreteInnerResult inner_solve_discrete(const SystemConfig& cfg, const ChannelRealization& ch,
                                         double q, const DiscreteMultiplierState& warm);

// Feasible extraction: keep the chosen energy mode, restrict each subcarrier's
// (k, n) argmax to splits compatible with it, then repair rate shortfalls.
DiscretePolicy extract_primal_discrete(const SystemConfig& cfg, const ChannelRealization& ch,
                                       const DiscreteInnerResult& inner);

DiscreteSolveReport solve_discrete(const SystemConfig& cfg, const ChannelRealization& ch);

// Structural audit mirroring the continuous one, plus the selector rules:
// energy rows sum to 1, at most one information mode per assigned subcarrier.
std::vector<std::string> check_report(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const DiscreteSolveReport& rep);

}  // namespace swipt
