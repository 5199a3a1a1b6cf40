#include "swipt/baselines.hpp"

#include <sstream>

namespace swipt {

namespace {
std::string selected_modes(const DiscretePolicy& pol) {
  std::ostringstream out;
  for (int k = 0; k < pol.e_select.rows; ++k) {
    double v = 0.0;
    for (size_t n = 0; n < pol.modes_e.size(); ++n)
      v += pol.e_select(k, (int)n) * pol.modes_e[n];
    if (k) out << ';';
    out << v;
  }
  return out.str();
}
}  // namespace

DiscreteSolveReport baseline_capacity(const SystemConfig& cfg, const ChannelRealization& ch) {
  DiscreteSolveReport rep;
  rep.q_trajectory.push_back(0.0);
  rep.q_original_trajectory.push_back(0.0);

  DiscreteMultiplierState warm;
  DiscreteInnerResult inner = inner_solve_discrete(cfg, ch, 0.0, warm);
  DiscretePolicy pol = extract_primal_discrete(cfg, ch, inner);
  rep.inner_iterations.push_back(inner.iterations);
  rep.dual_residual.push_back(inner.final_step);
  rep.mode_e_trajectory.push_back(selected_modes(pol));
  rep.outer_iterations = 1;

  rep.policy = pol;
  rep.metrics = evaluate(cfg, ch, collapse(pol));
  rep.feasible = check_feasible(cfg, ch, pol).empty();
  rep.status = rep.feasible ? "converged" : "infeasible";
  if (rep.feasible) {
    rep.q_bpj = rep.metrics.efficiency_bpj;
    rep.q_original_bpj = rep.metrics.efficiency_bpj;
    rep.q_trajectory.push_back(rep.metrics.efficiency_bpj);
    rep.q_original_trajectory.push_back(rep.metrics.efficiency_bpj);
  } else {
    rep.metrics.capacity_bps = 0.0;
    rep.metrics.efficiency_bpj = 0.0;
  }
  return rep;
}

SolveReport baseline_no_harvest(const SystemConfig& cfg, const ChannelRealization& ch) {
  SystemConfig mod = cfg;
  for (int k = 0; k < mod.n_receivers; ++k) {
    mod.eta[k] = 0.0;
    mod.p_req_w[k] = 0.0;
  }
  mod.rho_e_min = 0.0;
  mod.rho_e_max = 0.0;
  mod.rho_i_min = 1.0;
  mod.rho_i_max = 1.0;
  return solve_continuous(mod, ch);
}

}  // namespace swipt
