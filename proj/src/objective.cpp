#include "swipt/objective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swipt {

double sinr(double p_w, double g, double rho_i, double sigma_bar_w, double sigma_proc_w) {
  double denom = rho_i * sigma_bar_w + sigma_proc_w;
  if (denom <= 0.0) return 0.0;
  return rho_i * p_w * g / denom;
}

double subcarrier_rate_bps(double w_hz, double p_w, double g, double rho_i,
                           double sigma_bar_w, double sigma_proc_w) {
  return w_hz * std::log2(1.0 + sinr(p_w, g, rho_i, sigma_bar_w, sigma_proc_w));
}

ContinuousPolicy collapse(const DiscretePolicy& pol) {
  const int n_f = pol.power.d0, K = pol.power.d1, N = pol.power.d2;
  ContinuousPolicy out(n_f, K);
  for (int k = 0; k < K; ++k) {
    double rho_e = 0.0;
    for (int n = 0; n < N; ++n) rho_e += pol.e_select(k, n) * pol.modes_e[n];
    out.rho_e[k] = rho_e;
    for (int i = 0; i < n_f; ++i) {
      for (int n = 0; n < N; ++n) {
        if (pol.assign(i, k, n) > 0.0) {
          out.assign(i, k) = pol.assign(i, k, n);
          out.power(i, k) = pol.power(i, k, n);
          out.rho_i(i, k) = pol.modes_i[n];
        }
      }
    }
  }
  return out;
}

// Sum of scheduled power on subcarrier i across receivers.
static double scheduled_power(const ContinuousPolicy& pol, int i) {
  double s = 0.0;
  for (int k = 0; k < pol.power.cols; ++k) s += pol.power(i, k) * pol.assign(i, k);
  return s;
}

double harvested_w(const SystemConfig& cfg, const ChannelRealization& ch,
                   const ContinuousPolicy& pol, int k) {
  double q_d = 0.0, q_i = 0.0;
  for (int i = 0; i < ch.n_subcarriers; ++i) {
    q_d += scheduled_power(pol, i) * effective_gain(ch, i, k);
    q_i += cfg.sigma_ant_w + ch.sigma_int_w(i, k);
  }
  return (q_d + q_i) * cfg.eta[k] * pol.rho_e[k];
}

Metrics evaluate(const SystemConfig& cfg, const ChannelRealization& ch,
                 const ContinuousPolicy& pol) {
  const int n_f = ch.n_subcarriers, K = ch.n_receivers;
  Metrics m;
  m.harvested_w.assign(K, 0.0);
  m.rate_bps.assign(K, 0.0);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < n_f; ++i) {
      double s = pol.assign(i, k);
      if (s <= 0.0) continue;
      double sigma_bar = cfg.sigma_ant_w + ch.sigma_int_w(i, k);
      m.rate_bps[k] += s * subcarrier_rate_bps(cfg.subcarrier_bw_hz, pol.power(i, k),
                                               effective_gain(ch, i, k), pol.rho_i(i, k),
                                               sigma_bar, cfg.sigma_proc_w);
      m.transmit_power_w += s * pol.power(i, k);
    }
    m.capacity_bps += cfg.alpha[k] * m.rate_bps[k];
    m.harvested_w[k] = harvested_w(cfg, ch, pol, k);
    m.harvested_w_total += m.harvested_w[k];
  }
  m.supply_power_w = cfg.p_ct_w + K * cfg.p_cr_w + cfg.eps_pa * m.transmit_power_w -
                     m.harvested_w_total;
  m.efficiency_bpj = m.supply_power_w > 0.0 ? m.capacity_bps / m.supply_power_w : 0.0;
  return m;
}

namespace {

std::string at(int i, int k) {
  std::ostringstream os;
  os << "(i=" << i << ", k=" << k << ")";
  return os.str();
}

void require(std::vector<Violation>& out, const std::string& name, double slack, double tol,
             const std::string& detail) {
  // slack >= -tol passes; amount reports how far past the tolerance.
  if (slack < -tol) out.push_back({name, -slack, detail});
}

}  // namespace

std::vector<Violation> check_feasible(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const ContinuousPolicy& pol, FeasibilityMode mode) {
  std::vector<Violation> out;
  const int n_f = ch.n_subcarriers, K = ch.n_receivers;
  const double tol_w = 1e-9;            // absolute, watts
  const double tol_ratio = 1e-9;        // splitting ratios
  const double tol_rate = 1e-6;         // relative, rates

  if (pol.power.rows != n_f || pol.power.cols != K) {
    out.push_back({"shape", 0.0, "policy dimensions do not match the realization"});
    return out;
  }

  Metrics m = evaluate(cfg, ch, pol);

  // Boolean scheduling with at most one receiver per subcarrier.
  for (int i = 0; i < n_f; ++i) {
    double row = 0.0;
    for (int k = 0; k < K; ++k) {
      double s = pol.assign(i, k);
      if (mode == FeasibilityMode::Original && s != 0.0 && s != 1.0)
        out.push_back({"C7", std::min(s, 1.0 - s), "fractional assignment " + at(i, k)});
      if (s < 0.0 || s > 1.0)
        out.push_back({"C7", std::max(-s, s - 1.0), "assignment out of range " + at(i, k)});
      row += s;
    }
    require(out, "C8", 1.0 - row, tol_ratio, "subcarrier " + std::to_string(i) + " over-assigned");
  }

  for (int k = 0; k < K; ++k) {
    // Harvesting floor; the rewritten form divides by the common ratio instead.
    if (mode == FeasibilityMode::Relaxed && pol.rho_e[k] > 0.0) {
      double pickup = m.harvested_w[k] / pol.rho_e[k];
      require(out, "C1", pickup - cfg.p_req_w[k] / pol.rho_e[k],
              tol_w * (1.0 + cfg.p_req_w[k]), "receiver " + std::to_string(k));
    } else {
      require(out, "C1", m.harvested_w[k] - cfg.p_req_w[k], tol_w * (1.0 + cfg.p_req_w[k]),
              "receiver " + std::to_string(k));
    }
  }
  require(out, "C2", cfg.p_max_w - m.transmit_power_w, tol_w * (1.0 + cfg.p_max_w),
          "radiated power cap");
  require(out, "C3", cfg.p_pg_w - (cfg.p_ct_w + cfg.eps_pa * m.transmit_power_w),
          tol_w * (1.0 + cfg.p_pg_w), "grid draw cap");
  double sum_rate = 0.0;
  for (int k = 0; k < K; ++k) sum_rate += m.rate_bps[k];
  require(out, "C4", sum_rate - cfg.r_min_bps, tol_rate * std::max(cfg.r_min_bps, 1.0),
          "system rate floor");
  for (int k : cfg.delay_set)
    require(out, "C5", m.rate_bps[k] - cfg.r_min_k_bps[k],
            tol_rate * std::max(cfg.r_min_k_bps[k], 1.0), "receiver " + std::to_string(k));

  for (int k = 0; k < K; ++k) {
    require(out, "C9", pol.rho_e[k] - cfg.rho_e_min, tol_ratio, "receiver " + std::to_string(k));
    require(out, "C9", cfg.rho_e_max - pol.rho_e[k], tol_ratio, "receiver " + std::to_string(k));
    for (int i = 0; i < n_f; ++i) {
      double p = pol.power(i, k);
      if (p < 0.0) out.push_back({"C6", -p, "negative power " + at(i, k)});
      double s = pol.assign(i, k);
      if (s <= 0.0) continue;  // splitting bounds bind only where scheduled
      double rho_i_eff = pol.rho_i(i, k) * s;
      require(out, "C10", rho_i_eff - cfg.rho_i_min, tol_ratio, at(i, k));
      require(out, "C10", cfg.rho_i_max - rho_i_eff, tol_ratio, at(i, k));
      require(out, "C11", 1.0 - rho_i_eff - pol.rho_e[k], tol_ratio, at(i, k));
    }
  }
  // C12 holds by representation: one harvesting ratio per receiver.
  return out;
}

std::vector<Violation> check_feasible(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const DiscretePolicy& pol, FeasibilityMode mode) {
  std::vector<Violation> out;
  const int n_f = pol.power.d0, K = pol.power.d1, N = pol.power.d2;
  if (n_f != ch.n_subcarriers || K != ch.n_receivers ||
      N != static_cast<int>(pol.modes_e.size()) || N != static_cast<int>(pol.modes_i.size())) {
    out.push_back({"shape", 0.0, "policy dimensions do not match the realization"});
    return out;
  }
  // One energy level per receiver.
  for (int k = 0; k < K; ++k) {
    double row = 0.0;
    for (int n = 0; n < N; ++n) {
      double a = pol.e_select(k, n);
      if (a != 0.0 && a != 1.0)
        out.push_back({"C14", std::abs(a - 0.5), "fractional level pick, receiver " +
                                                      std::to_string(k)});
      row += a;
    }
    if (std::abs(row - 1.0) > 1e-9)
      out.push_back({"C14", std::abs(row - 1.0),
                     "receiver " + std::to_string(k) + " must pick exactly one level"});
  }
  // Each (i,k) may use at most one information level.
  for (int i = 0; i < n_f; ++i)
    for (int k = 0; k < K; ++k) {
      double row = 0.0;
      for (int n = 0; n < N; ++n) row += pol.assign(i, k, n);
      if (row > 1.0 + 1e-9)
        out.push_back({"C15", row - 1.0, "multiple levels on " + at(i, k)});
    }
  auto cont = collapse(pol);
  auto base = check_feasible(cfg, ch, cont, mode);
  out.insert(out.end(), base.begin(), base.end());
  return out;
}

}  // namespace swipt
