#include "swipt/solver_continuous.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

namespace swipt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }
}  // namespace

double price_a(const SystemConfig& cfg, const MultiplierState& m, int k) {
  return cfg.alpha[k] + m.gamma + m.upsilon[k];
}

double price_phi(const SystemConfig& cfg, const ChannelRealization& ch,
                 const MultiplierState& m, int i, double q) {
  double harvest = 0.0;
  for (int k = 0; k < ch.n_receivers; ++k)
    harvest += (q + m.w[k]) * effective_gain(ch, i, k) * cfg.eta[k];
  return q * cfg.eps_pa + m.beta * cfg.eps_pa + m.lambda - harvest;
}

double best_power_w(const SystemConfig& cfg, double a_k, double phi_i) {
  if (a_k <= 0.0) return 0.0;
  if (phi_i <= 0.0) return cfg.p_max_w;  // unbounded water level, saturate
  double p = cfg.subcarrier_bw_hz * a_k / (kLn2 * phi_i);
  return clamp(p, 0.0, cfg.p_max_w);
}

double best_rho_i(const SystemConfig& cfg, double a_k, double delta_ik, double sigma_bar_w) {
  double hi = cfg.rho_i_max;
  if (delta_ik <= 0.0) return hi;  // vanishing price, take the cap
  double s2 = cfg.sigma_proc_w;
  double psi = std::sqrt(4.0 * cfg.subcarrier_bw_hz * a_k * sigma_bar_w + delta_ik * kLn2 * s2) *
               std::sqrt(s2);
  double pre = psi / (2.0 * std::sqrt(kLn2 * delta_ik) * sigma_bar_w) - s2 / (2.0 * sigma_bar_w);
  return clamp(std::max(pre, 0.0), cfg.rho_i_min, hi);
}

double best_rho_e_row0(double q, double w_k, double p_req_w, double delta_0k,
                       double mu_col_sum, double sigma_bar_w, double eta_k,
                       double rho_e_lo, double rho_e_hi) {
  double num = w_k * p_req_w;
  double den = delta_0k - q * sigma_bar_w * eta_k + mu_col_sum;
  // the row gradient is num / rho^2 - den: with den <= 0 it stays positive at
  // every level, so the maximizer sits on the upper edge; a positive den
  // either balances the floor term or, with the floor dead, points down.
  double pre;
  if (den > 0.0)
    pre = num > 0.0 ? std::sqrt(num / den) : 0.0;
  else if (num > 0.0 || den < 0.0)
    pre = kInf;
  else
    pre = 0.0;  // flat direction, keep the floor
  return clamp(pre, rho_e_lo, rho_e_hi);
}

double best_rho_e_row(double q, double eta_k, double sigma_bar_w, double delta_jk,
                      double mu_jk, double rho_e_lo, double rho_e_hi) {
  return clamp(q * sigma_bar_w * eta_k - delta_jk + mu_jk, rho_e_lo, rho_e_hi);
}

double approx_rate_bps(double w_hz, double p_w, double g, double rho_i, double sigma_bar_w,
                       double sigma_proc_w) {
  if (p_w <= 0.0 || g <= 0.0) return -kInf;
  double ratio;
  if (sigma_proc_w <= 0.0) {
    // splitting cancels out of the SINR entirely
    ratio = p_w * g / sigma_bar_w;
  } else {
    if (rho_i <= 0.0) return -kInf;
    ratio = rho_i * p_w * g / (rho_i * sigma_bar_w + sigma_proc_w);
  }
  if (ratio <= 0.0) return -kInf;
  return w_hz * std::log2(ratio);
}

double assignment_metric(const SystemConfig& cfg, double a_k, double p_w, double g,
                         double rho_i, double sigma_bar_w) {
  if (p_w <= 0.0 || g <= 0.0) return -kInf;
  double s2 = cfg.sigma_proc_w;
  double term1 = std::log2(p_w * g);
  double term2, term4;
  if (s2 <= 0.0) {
    term2 = -std::log2(sigma_bar_w);
    term4 = 0.0;
  } else {
    if (rho_i <= 0.0) return -kInf;
    double split_noise = rho_i * sigma_bar_w + s2;
    term2 = std::log2(rho_i / split_noise);
    term4 = -s2 / (kLn2 * split_noise);
  }
  return cfg.subcarrier_bw_hz * a_k * (term1 + term2 - 1.0 / kLn2 + term4);
}

SurrogatePair surrogate_pair(const SystemConfig& cfg, const ChannelRealization& ch,
                             const ContinuousPolicy& pol) {
  const int n_f = ch.n_subcarriers, K = ch.n_receivers;
  SurrogatePair out;
  double transmit = 0.0;
  std::vector<double> row_power(n_f, 0.0);
  for (int i = 0; i < n_f; ++i)
    for (int k = 0; k < K; ++k) row_power[i] += pol.power(i, k) * pol.assign(i, k);
  for (int k = 0; k < K; ++k) {
    double pickup = 0.0, noise_sum = 0.0;
    for (int i = 0; i < n_f; ++i) {
      double sigma_bar = cfg.sigma_ant_w + ch.sigma_int_w(i, k);
      pickup += row_power[i] * effective_gain(ch, i, k);
      noise_sum += sigma_bar;
      double s = pol.assign(i, k);
      if (s <= 0.0) continue;
      double r = approx_rate_bps(cfg.subcarrier_bw_hz, pol.power(i, k),
                                 effective_gain(ch, i, k), pol.rho_i(i, k), sigma_bar,
                                 cfg.sigma_proc_w);
      if (r > -kInf) out.u_hat += cfg.alpha[k] * s * r;
      transmit += s * pol.power(i, k);
    }
    out.u_tp_hat -= cfg.eta[k] * (pickup + pol.rho_e[k] * noise_sum);
  }
  out.u_tp_hat += cfg.p_ct_w + K * cfg.p_cr_w + cfg.eps_pa * transmit;
  return out;
}

namespace {

// Everything a Level-1 pass produces for one multiplier state.
struct Level1 {
  Grid power;       // per-use watts
  Grid assign;      // Boolean
  Grid rho_i;       // per-use ratios
  Grid rho_e;       // per-(i,k) rows, row 0 authoritative
  std::vector<double> a;    // per-receiver rate prices
  std::vector<double> phi;  // per-subcarrier power prices

  Level1(int n_f, int k)
      : power(n_f, k), assign(n_f, k), rho_i(n_f, k), rho_e(n_f, k), a(k), phi(n_f) {}
};

struct Workspace {
  const SystemConfig& cfg;
  const ChannelRealization& ch;
  int n_f, K;
  Grid sigma_bar;                     // antenna + interference per (i,k)
  std::vector<double> noise_sum;      // per k: sum_i sigma_bar
  std::vector<double> int_sum;        // per k: sum_i sigma_int
  std::vector<double> rho_e_lo;       // per k, raised off zero when a floor exists
  std::vector<char> delay;            // per k

  Workspace(const SystemConfig& c, const ChannelRealization& r)
      : cfg(c), ch(r), n_f(r.n_subcarriers), K(r.n_receivers), sigma_bar(n_f, K),
        noise_sum(K, 0.0), int_sum(K, 0.0), rho_e_lo(K, c.rho_e_min), delay(K, 0) {
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < n_f; ++i) {
        sigma_bar(i, k) = c.sigma_ant_w + r.sigma_int_w(i, k);
        noise_sum[k] += sigma_bar(i, k);
        int_sum[k] += r.sigma_int_w(i, k);
      }
      // the rewritten harvesting floor divides by this ratio
      if (c.p_req_w[k] > 0.0) rho_e_lo[k] = std::max(c.rho_e_min, 1e-6);
    }
    for (int k : c.delay_set) delay[k] = 1;
  }
};

Level1 level1_solve(const Workspace& ws, double q, const MultiplierState& m) {
  const SystemConfig& cfg = ws.cfg;
  Level1 x(ws.n_f, ws.K);
  for (int k = 0; k < ws.K; ++k) x.a[k] = price_a(cfg, m, k);
  for (int i = 0; i < ws.n_f; ++i) x.phi[i] = price_phi(cfg, ws.ch, m, i, q);

  for (int k = 0; k < ws.K; ++k) {
    double mu_col = 0.0;
    for (int j = 1; j < ws.n_f; ++j) mu_col += m.mu(j, k);
    x.rho_e(0, k) = best_rho_e_row0(q, m.w[k], cfg.p_req_w[k], m.delta(0, k), mu_col,
                                    ws.sigma_bar(0, k), cfg.eta[k], ws.rho_e_lo[k],
                                    cfg.rho_e_max);
    for (int j = 1; j < ws.n_f; ++j)
      x.rho_e(j, k) = best_rho_e_row(q, cfg.eta[k], ws.sigma_bar(j, k), m.delta(j, k),
                                     m.mu(j, k), ws.rho_e_lo[k], cfg.rho_e_max);
  }

  for (int i = 0; i < ws.n_f; ++i) {
    double best = -kInf;
    int winner = -1;
    for (int k = 0; k < ws.K; ++k) {
      x.power(i, k) = best_power_w(cfg, x.a[k], x.phi[i]);
      x.rho_i(i, k) = best_rho_i(cfg, x.a[k], m.delta(i, k), ws.sigma_bar(i, k));
      double metric = assignment_metric(cfg, x.a[k], x.power(i, k), effective_gain(ws.ch, i, k),
                                        x.rho_i(i, k), ws.sigma_bar(i, k));
      if (metric > best) {
        best = metric;
        winner = k;
      }
    }
    if (winner >= 0 && best > -kInf) x.assign(i, winner) = 1.0;
  }
  return x;
}

// Constraint slacks in the satisfied-positive convention; the multiplier step
// is m <- [m - step * slack].
struct Slacks {
  double lambda = 0.0, beta = 0.0, gamma = 0.0;
  std::vector<double> upsilon, w;
  Grid delta, mu;

  Slacks(int n_f, int k) : upsilon(k, 0.0), w(k, 0.0), delta(n_f, k), mu(n_f, k) {}
};

Slacks compute_slacks(const Workspace& ws, const Level1& x, const MultiplierState& m) {
  const SystemConfig& cfg = ws.cfg;
  Slacks g(ws.n_f, ws.K);
  double transmit = 0.0, rate_total = 0.0;
  std::vector<double> row_power(ws.n_f, 0.0);
  for (int i = 0; i < ws.n_f; ++i)
    for (int k = 0; k < ws.K; ++k) {
      double p = x.power(i, k) * x.assign(i, k);
      transmit += p;
      row_power[i] += p;
    }
  g.lambda = cfg.p_max_w - transmit;
  g.beta = cfg.p_pg_w - cfg.p_ct_w - cfg.eps_pa * transmit;
  for (int k = 0; k < ws.K; ++k) {
    double rate_k = 0.0;
    double pickup = 0.0;
    for (int i = 0; i < ws.n_f; ++i) {
      if (x.assign(i, k) > 0.0) {
        double r = approx_rate_bps(cfg.subcarrier_bw_hz, x.power(i, k),
                                   effective_gain(ws.ch, i, k), x.rho_i(i, k),
                                   ws.sigma_bar(i, k), cfg.sigma_proc_w);
        if (r > -kInf) rate_k += r;
      }
      pickup += row_power[i] * effective_gain(ws.ch, i, k);
      g.delta(i, k) = 1.0 - x.rho_i(i, k) * x.assign(i, k) - x.rho_e(i, k);
      if (i >= 1) g.mu(i, k) = x.rho_e(i, k) - x.rho_e(0, k);
    }
    rate_total += rate_k;
    if (ws.delay[k]) g.upsilon[k] = rate_k - cfg.r_min_k_bps[k];
    double floor = cfg.p_req_w[k] > 0.0 ? cfg.p_req_w[k] / x.rho_e(0, k) : 0.0;
    g.w[k] = (pickup + ws.int_sum[k]) * cfg.eta[k] - floor;
  }
  g.gamma = rate_total - cfg.r_min_bps;
  return g;
}

double dual_value(const Workspace& ws, double q, const MultiplierState& m, const Level1& x) {
  const SystemConfig& cfg = ws.cfg;
  double value = 0.0;
  double transmit = 0.0;
  std::vector<double> row_power(ws.n_f, 0.0);
  for (int i = 0; i < ws.n_f; ++i)
    for (int k = 0; k < ws.K; ++k) {
      double p = x.power(i, k) * x.assign(i, k);
      transmit += p;
      row_power[i] += p;
    }
  double harvest_hat = 0.0;  // rebate with the information split fully recycled
  for (int k = 0; k < ws.K; ++k) {
    double pickup = 0.0, q_i = 0.0, rate_k = 0.0;
    for (int i = 0; i < ws.n_f; ++i) {
      pickup += row_power[i] * effective_gain(ws.ch, i, k);
      q_i += ws.sigma_bar(i, k) * x.rho_e(i, k);
      if (x.assign(i, k) > 0.0) {
        double r = approx_rate_bps(cfg.subcarrier_bw_hz, x.power(i, k),
                                   effective_gain(ws.ch, i, k), x.rho_i(i, k),
                                   ws.sigma_bar(i, k), cfg.sigma_proc_w);
        if (r > -kInf) rate_k += r;
      }
      value -= m.delta(i, k) * (x.rho_i(i, k) * x.assign(i, k) + x.rho_e(i, k) - 1.0);
      if (i >= 1) value -= m.mu(i, k) * (x.rho_e(0, k) - x.rho_e(i, k));
    }
    value += x.a[k] * rate_k;
    harvest_hat += cfg.eta[k] * (pickup + q_i);
    double floor = cfg.p_req_w[k] > 0.0 ? cfg.p_req_w[k] / x.rho_e(0, k) : 0.0;
    value -= m.w[k] * (floor - (pickup + ws.int_sum[k]) * cfg.eta[k]);
    if (ws.delay[k]) value -= m.upsilon[k] * cfg.r_min_k_bps[k];
  }
  value -= m.lambda * (transmit - cfg.p_max_w);
  value -= q * (cfg.p_ct_w + ws.K * cfg.p_cr_w + cfg.eps_pa * transmit - harvest_hat);
  value -= m.gamma * cfg.r_min_bps;
  value -= m.beta * (cfg.p_ct_w + cfg.eps_pa * transmit - cfg.p_pg_w);
  return value;
}

// Per-family step scales bridging the very different magnitudes the
// multipliers settle at. Each is roughly (multiplier scale) / (slack scale).
struct StepScales {
  double lambda = 0.0, beta = 0.0, gamma = 0.0;
  std::vector<double> upsilon, w;
  Grid delta, mu;

  StepScales(int n_f, int k) : upsilon(k, 0.0), w(k, 0.0), delta(n_f, k), mu(n_f, k) {}
};

StepScales step_scales(const Workspace& ws, double q, const MultiplierState& m) {
  const SystemConfig& cfg = ws.cfg;
  StepScales s(ws.n_f, ws.K);
  double rate_cap = ws.n_f * cfg.subcarrier_bw_hz;  // slack magnitudes for rate floors
  s.lambda = (m.lambda + cfg.eps_pa * (q + 1.0) + 1.0) / cfg.p_max_w;
  s.beta = (m.beta + cfg.eps_pa * (q + 1.0) + 1.0) /
           std::max(cfg.p_pg_w - cfg.p_ct_w, 0.1 * cfg.p_pg_w);
  double mean_alpha = std::accumulate(cfg.alpha.begin(), cfg.alpha.end(), 0.0) / ws.K;
  s.gamma = (m.gamma + mean_alpha) / std::max(cfg.r_min_bps, rate_cap);
  for (int k = 0; k < ws.K; ++k) {
    s.upsilon[k] = (m.upsilon[k] + cfg.alpha[k]) / std::max(cfg.r_min_k_bps[k], rate_cap);
    s.w[k] = (m.w[k] + q + 1.0) / std::max(cfg.p_req_w[k], 1e-3);
    for (int i = 0; i < ws.n_f; ++i) {
      double wa = cfg.subcarrier_bw_hz * price_a(cfg, m, k);
      s.delta(i, k) = m.delta(i, k) + wa + 1.0;
      s.mu(i, k) = std::abs(m.mu(i, k)) + m.delta(i, k) +
                   q * ws.sigma_bar(i, k) * cfg.eta[k] + 1.0;
    }
  }
  return s;
}

MultiplierState apply_step(const Workspace& ws, const MultiplierState& m, const Slacks& g,
                           const StepScales& s, double theta) {
  MultiplierState out = m;
  auto pos = [](double v) { return std::max(v, 0.0); };
  out.lambda = pos(m.lambda - theta * s.lambda * g.lambda);
  out.beta = pos(m.beta - theta * s.beta * g.beta);
  out.gamma = pos(m.gamma - theta * s.gamma * g.gamma);
  for (int k = 0; k < ws.K; ++k) {
    if (ws.delay[k]) out.upsilon[k] = pos(m.upsilon[k] - theta * s.upsilon[k] * g.upsilon[k]);
    out.w[k] = pos(m.w[k] - theta * s.w[k] * g.w[k]);
    for (int i = 0; i < ws.n_f; ++i) {
      out.delta(i, k) = pos(m.delta(i, k) - theta * s.delta(i, k) * g.delta(i, k));
      if (i >= 1) out.mu(i, k) = m.mu(i, k) - theta * s.mu(i, k) * g.mu(i, k);  // unprojected
    }
  }
  return out;
}

double directional_sq(const Workspace& ws, const Slacks& g, const StepScales& s) {
  double dd = s.lambda * g.lambda * g.lambda + s.beta * g.beta * g.beta +
              s.gamma * g.gamma * g.gamma;
  for (int k = 0; k < ws.K; ++k) {
    if (ws.delay[k]) dd += s.upsilon[k] * g.upsilon[k] * g.upsilon[k];
    dd += s.w[k] * g.w[k] * g.w[k];
    for (int i = 0; i < ws.n_f; ++i) {
      dd += s.delta(i, k) * g.delta(i, k) * g.delta(i, k);
      if (i >= 1) dd += s.mu(i, k) * g.mu(i, k) * g.mu(i, k);
    }
  }
  return dd;
}

double relative_change(const Workspace& ws, const MultiplierState& a, const MultiplierState& b,
                       const StepScales& s) {
  auto rel = [](double x, double y, double scale) {
    return std::abs(x - y) / (std::abs(x) + 1e-6 * scale + DBL_MIN);
  };
  double r = rel(a.lambda, b.lambda, s.lambda);
  r = std::max(r, rel(a.beta, b.beta, s.beta));
  r = std::max(r, rel(a.gamma, b.gamma, s.gamma));
  for (int k = 0; k < ws.K; ++k) {
    r = std::max(r, rel(a.upsilon[k], b.upsilon[k], s.upsilon[k]));
    r = std::max(r, rel(a.w[k], b.w[k], s.w[k]));
    for (int i = 0; i < ws.n_f; ++i) {
      r = std::max(r, rel(a.delta(i, k), b.delta(i, k), s.delta(i, k)));
      if (i >= 1) r = std::max(r, rel(a.mu(i, k), b.mu(i, k), s.mu(i, k)));
    }
  }
  return r;
}

MultiplierState initial_multipliers(const Workspace& ws) {
  MultiplierState m(ws.n_f, ws.K);
  m.lambda = m.beta = m.gamma = 0.1;
  for (int k = 0; k < ws.K; ++k) {
    if (ws.delay[k]) m.upsilon[k] = 0.1;
    if (ws.cfg.p_req_w[k] > 0.0) m.w[k] = 0.1;
    for (int i = 0; i < ws.n_f; ++i) m.delta(i, k) = 1.0;
  }
  return m;
}

bool state_empty(const MultiplierState& m) { return m.delta.rows == 0; }

}  // namespace

InnerResult inner_solve(const SystemConfig& cfg, const ChannelRealization& ch, double q,
                        const MultiplierState& warm) {
  Workspace ws(cfg, ch);
  MultiplierState m = state_empty(warm) ? initial_multipliers(ws) : warm;
  const DualOptions& opt = cfg.dual;

  Level1 x = level1_solve(ws, q, m);
  double d_cur = dual_value(ws, q, m, x);
  int it = 0;
  double last_rel = kInf;
  for (; it < opt.max_iterations; ++it) {
    Slacks g = compute_slacks(ws, x, m);
    StepScales s = step_scales(ws, q, m);
    double dd = directional_sq(ws, g, s);

    double theta = opt.step0;
    MultiplierState cand;
    Level1 x_cand(0, 0);
    double d_cand = 0.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      cand = apply_step(ws, m, g, s, theta);
      x_cand = level1_solve(ws, q, cand);
      d_cand = dual_value(ws, q, cand, x_cand);
      if (d_cand <= d_cur - opt.armijo_c * theta * dd) {
        accepted = true;
        break;
      }
      theta *= opt.shrink;
    }
    // smallest step is kept even without sufficient decrease; the projected
    // move is tiny by then and stalling here would freeze the multipliers
    last_rel = relative_change(ws, m, cand, s);
    m = std::move(cand);
    x = std::move(x_cand);
    d_cur = d_cand;
    (void)accepted;
    if (last_rel < opt.tol) {
      ++it;
      break;
    }
  }

  InnerResult res;
  res.policy = ContinuousPolicy(ws.n_f, ws.K);
  res.policy.power = x.power;
  res.policy.assign = x.assign;
  res.policy.rho_i = x.rho_i;
  for (int k = 0; k < ws.K; ++k) res.policy.rho_e[k] = x.rho_e(0, k);
  res.rho_e_rows = x.rho_e;
  res.multipliers = m;
  res.iterations = it;
  res.final_step = last_rel;
  res.dual_value = d_cur;
  return res;
}

namespace {

// Scale scheduled powers so the radiated and grid caps hold.
void enforce_power_caps(const SystemConfig& cfg, ContinuousPolicy& pol) {
  double total = 0.0;
  for (int i = 0; i < pol.power.rows; ++i)
    for (int k = 0; k < pol.power.cols; ++k) total += pol.power(i, k) * pol.assign(i, k);
  if (total <= 0.0) return;
  double cap = std::min(cfg.p_max_w, (cfg.p_pg_w - cfg.p_ct_w) / cfg.eps_pa);
  if (total > cap) {
    double scale = cap / total;
    for (int i = 0; i < pol.power.rows; ++i)
      for (int k = 0; k < pol.power.cols; ++k) pol.power(i, k) *= scale;
  }
}

double receiver_rate(const SystemConfig& cfg, const ChannelRealization& ch,
                     const ContinuousPolicy& pol, int k) {
  double r = 0.0;
  for (int i = 0; i < ch.n_subcarriers; ++i) {
    if (pol.assign(i, k) <= 0.0) continue;
    r += subcarrier_rate_bps(cfg.subcarrier_bw_hz, pol.power(i, k), effective_gain(ch, i, k),
                             pol.rho_i(i, k), cfg.sigma_ant_w + ch.sigma_int_w(i, k),
                             cfg.sigma_proc_w);
  }
  return r;
}

// Raise each receiver's harvesting split just enough for its floor, given the
// current schedule; the pickup does not depend on the split itself. An
// efficiency maximizer can leave so little radiated power that the floor is
// out of reach at any admissible split; in that case spend budget headroom on
// the scheduled subcarriers this receiver hears best before touching rho_e.
void repair_harvest(const SystemConfig& cfg, const ChannelRealization& ch,
                    ContinuousPolicy& pol) {
  double cap = std::min(cfg.p_max_w, (cfg.p_pg_w - cfg.p_ct_w) / cfg.eps_pa);
  std::vector<char> is_delay(ch.n_receivers, 0);
  for (int j : cfg.delay_set) is_delay[j] = 1;
  auto total_power = [&]() {
    double t = 0.0;
    for (int i = 0; i < pol.power.rows; ++i)
      for (int j = 0; j < pol.power.cols; ++j) t += pol.power(i, j) * pol.assign(i, j);
    return t;
  };
  for (int k = 0; k < ch.n_receivers; ++k) {
    if (cfg.p_req_w[k] <= 0.0) continue;
    bool scheduled = false;
    for (int i = 0; i < ch.n_subcarriers && !scheduled; ++i)
      scheduled = pol.assign(i, k) > 0.0;
    // the split may not crowd the receiver's own decoding out of its box, and
    // a rate-floored receiver keeps some working room on top of that
    double ceiling = cfg.rho_e_max;
    if (scheduled) ceiling = std::min(ceiling, 1.0 - cfg.rho_i_min);
    if (is_delay[k] && cfg.r_min_k_bps[k] > 0.0)
      ceiling = std::min(ceiling, 1.0 - std::max(cfg.rho_i_min, 0.1));
    ceiling = std::max(ceiling, cfg.rho_e_min);
    double pickup = 0.0;
    for (int i = 0; i < ch.n_subcarriers; ++i) {
      double row = 0.0;
      for (int j = 0; j < ch.n_receivers; ++j) row += pol.power(i, j) * pol.assign(i, j);
      pickup += row * effective_gain(ch, i, k) + cfg.sigma_ant_w + ch.sigma_int_w(i, k);
    }
    if (cfg.eta[k] > 0.0 && ceiling > 0.0 &&
        pickup * cfg.eta[k] * ceiling < cfg.p_req_w[k]) {
      double target = cfg.p_req_w[k] / (cfg.eta[k] * ceiling);
      struct Cell {
        double g;
        int i, j;
      };
      std::vector<Cell> cells;
      for (int i = 0; i < ch.n_subcarriers; ++i) {
        double g = effective_gain(ch, i, k);
        if (g <= 0.0) continue;
        for (int j = 0; j < ch.n_receivers; ++j)
          if (pol.assign(i, j) > 0.0) cells.push_back({g, i, j});
      }
      std::sort(cells.begin(), cells.end(),
                [](const Cell& a, const Cell& b) { return a.g > b.g; });
      for (const Cell& c : cells) {
        if (pickup >= target) break;
        double headroom = std::max(cap - total_power(), 0.0);
        if (headroom <= 0.0) break;
        double add = std::min((target - pickup) / c.g, headroom);
        pol.power(c.i, c.j) += add;
        pickup += add * c.g;
      }
    }
    pickup *= cfg.eta[k];
    if (pickup <= 0.0) continue;  // floor unreachable, the final check flags it
    double needed = cfg.p_req_w[k] / pickup;
    if (needed > pol.rho_e[k]) pol.rho_e[k] = std::min(needed, cfg.rho_e_max);
  }
}

void rebox_rho_i(const SystemConfig& cfg, ContinuousPolicy& pol) {
  for (int k = 0; k < pol.rho_i.cols; ++k) {
    double hi = std::min(cfg.rho_i_max, 1.0 - pol.rho_e[k]);
    for (int i = 0; i < pol.rho_i.rows; ++i)
      if (pol.assign(i, k) > 0.0)
        pol.rho_i(i, k) = clamp(pol.rho_i(i, k), cfg.rho_i_min, std::max(hi, cfg.rho_i_min));
  }
}

// Move subcarriers toward a rate-short receiver, cheapest capacity loss first.
void repair_receiver_rate(const SystemConfig& cfg, const ChannelRealization& ch,
                          ContinuousPolicy& pol, int k, double target_bps) {
  double rate = receiver_rate(cfg, ch, pol, k);
  if (rate >= target_bps) return;
  std::vector<char> is_delay(ch.n_receivers, 0);
  for (int j : cfg.delay_set) is_delay[j] = 1;
  // a harvesting split at (or near) the cap crowds out decoding entirely;
  // release whatever the harvest floor does not actually need
  {
    double pickup = 0.0;
    for (int i = 0; i < ch.n_subcarriers; ++i) {
      double row = 0.0;
      for (int j = 0; j < ch.n_receivers; ++j) row += pol.power(i, j) * pol.assign(i, j);
      pickup += row * effective_gain(ch, i, k) + cfg.sigma_ant_w + ch.sigma_int_w(i, k);
    }
    pickup *= cfg.eta[k];
    double needed = cfg.rho_e_min;
    if (cfg.p_req_w[k] > 0.0) {
      if (pickup <= 0.0)
        needed = pol.rho_e[k];  // floor unreachable either way, leave it alone
      else
        needed = std::max(needed, std::min(cfg.p_req_w[k] / pickup, cfg.rho_e_max));
    }
    if (needed < pol.rho_e[k]) pol.rho_e[k] = needed;
  }
  auto total_power = [&]() {
    double t = 0.0;
    for (int i = 0; i < pol.power.rows; ++i)
      for (int j = 0; j < pol.power.cols; ++j) t += pol.power(i, j) * pol.assign(i, j);
    return t;
  };
  double cap = std::min(cfg.p_max_w, (cfg.p_pg_w - cfg.p_ct_w) / cfg.eps_pa);
  auto fallback_power = [&]() {
    double p = 0.0;
    for (int i2 = 0; i2 < ch.n_subcarriers; ++i2)
      p = std::max(p, pol.power(i2, k) * pol.assign(i2, k));
    if (p <= 0.0) p = cfg.p_max_w / ch.n_subcarriers;
    return std::min(p, std::max(cap - total_power(), 0.0));
  };
  struct Candidate {
    double cost;
    double gain;
    int i, holder;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < ch.n_subcarriers; ++i) {
    if (pol.assign(i, k) > 0.0) continue;
    int holder = -1;
    for (int j = 0; j < ch.n_receivers; ++j)
      if (pol.assign(i, j) > 0.0) holder = j;
    // reuse the holder's power level, otherwise the strongest level already
    // granted to k subject to the radiated / supply headroom
    double p = holder >= 0 ? pol.power(i, holder) : fallback_power();
    if (p <= 0.0) continue;
    double sigma_bar = cfg.sigma_ant_w + ch.sigma_int_w(i, k);
    double rho = std::min(cfg.rho_i_max, 1.0 - pol.rho_e[k]);
    if (rho <= 0.0) continue;
    double gain = subcarrier_rate_bps(cfg.subcarrier_bw_hz, p, effective_gain(ch, i, k), rho,
                                      sigma_bar, cfg.sigma_proc_w);
    if (gain <= 0.0) continue;
    double cost = 0.0;
    if (holder >= 0)
      cost = cfg.alpha[holder] *
             subcarrier_rate_bps(cfg.subcarrier_bw_hz, pol.power(i, holder),
                                 effective_gain(ch, i, holder), pol.rho_i(i, holder),
                                 cfg.sigma_ant_w + ch.sigma_int_w(i, holder), cfg.sigma_proc_w);
    cands.push_back({cost, gain, i, holder});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.gain != b.gain) return a.gain > b.gain;
    return a.i < b.i;
  });
  for (const Candidate& c : cands) {
    if (rate >= target_bps) break;
    if (c.holder >= 0 && is_delay[c.holder]) {
      // never steal a subcarrier another delay receiver needs for its floor
      double lost = subcarrier_rate_bps(
          cfg.subcarrier_bw_hz, pol.power(c.i, c.holder), effective_gain(ch, c.i, c.holder),
          pol.rho_i(c.i, c.holder), cfg.sigma_ant_w + ch.sigma_int_w(c.i, c.holder),
          cfg.sigma_proc_w);
      if (receiver_rate(cfg, ch, pol, c.holder) - lost < cfg.r_min_k_bps[c.holder]) continue;
    }
    double p = c.holder >= 0 ? pol.power(c.i, c.holder) : fallback_power();
    if (p <= 0.0) continue;
    if (c.holder >= 0) {
      pol.assign(c.i, c.holder) = 0.0;
      pol.power(c.i, c.holder) = 0.0;
    }
    pol.assign(c.i, k) = 1.0;
    pol.power(c.i, k) = p;
    pol.rho_i(c.i, k) = std::max(std::min(cfg.rho_i_max, 1.0 - pol.rho_e[k]), cfg.rho_i_min);
    rate = receiver_rate(cfg, ch, pol, k);
  }
  if (rate >= target_bps) return;
  // moving subcarriers reuses their old power levels, which an efficiency
  // maximizer keeps small; spend the remaining budget headroom on the best
  // channels this receiver owns, and no more than the floor asks for
  std::vector<int> own;
  for (int i = 0; i < ch.n_subcarriers; ++i)
    if (pol.assign(i, k) > 0.0) own.push_back(i);
  std::sort(own.begin(), own.end(), [&](int a, int b) {
    return effective_gain(ch, a, k) > effective_gain(ch, b, k);
  });
  for (int i : own) {
    if (rate >= target_bps) break;
    double headroom = std::max(cap - total_power(), 0.0);
    double lo_p = pol.power(i, k);
    double hi_p = std::min(cfg.p_max_w, lo_p + headroom);
    if (hi_p <= lo_p) continue;
    pol.power(i, k) = hi_p;
    double r_hi = receiver_rate(cfg, ch, pol, k);
    if (r_hi < target_bps) {
      rate = r_hi;  // even the full headroom falls short here, keep it all
      continue;
    }
    for (int it = 0; it < 60 && hi_p - lo_p > 1e-12 * hi_p; ++it) {
      double mid = 0.5 * (lo_p + hi_p);
      pol.power(i, k) = mid;
      if (receiver_rate(cfg, ch, pol, k) >= target_bps)
        hi_p = mid;
      else
        lo_p = mid;
    }
    pol.power(i, k) = hi_p;
    rate = receiver_rate(cfg, ch, pol, k);
  }
}

// Scale all scheduled powers up toward the caps until the system rate floor
// holds; rates grow monotonically with the common factor.
void repair_system_rate(const SystemConfig& cfg, const ChannelRealization& ch,
                        ContinuousPolicy& pol) {
  if (cfg.r_min_bps <= 0.0) return;
  auto total_rate = [&]() {
    double r = 0.0;
    for (int k = 0; k < ch.n_receivers; ++k) r += receiver_rate(cfg, ch, pol, k);
    return r;
  };
  if (total_rate() >= cfg.r_min_bps) return;
  double total = 0.0;
  for (int i = 0; i < pol.power.rows; ++i)
    for (int k = 0; k < pol.power.cols; ++k) total += pol.power(i, k) * pol.assign(i, k);
  if (total <= 0.0) return;
  double cap = std::min(cfg.p_max_w, (cfg.p_pg_w - cfg.p_ct_w) / cfg.eps_pa);
  double max_scale = cap / total;
  // per-use powers also respect the amplifier limit
  for (int i = 0; i < pol.power.rows; ++i)
    for (int k = 0; k < pol.power.cols; ++k)
      if (pol.assign(i, k) > 0.0 && pol.power(i, k) > 0.0)
        max_scale = std::min(max_scale, cfg.p_max_w / pol.power(i, k));
  if (max_scale <= 1.0) return;
  double lo = 1.0, hi = max_scale;
  auto rate_at = [&](double scale) {
    ContinuousPolicy tmp = pol;
    for (int i = 0; i < tmp.power.rows; ++i)
      for (int k = 0; k < tmp.power.cols; ++k) tmp.power(i, k) *= scale;
    double r = 0.0;
    for (int k = 0; k < ch.n_receivers; ++k) r += receiver_rate(cfg, ch, tmp, k);
    return r;
  };
  if (rate_at(hi) < cfg.r_min_bps) {
    lo = hi;  // cannot reach the floor; take the cap and let the check flag it
  } else {
    for (int iter = 0; iter < 60 && hi - lo > 1e-9 * hi; ++iter) {
      double mid = 0.5 * (lo + hi);
      if (rate_at(mid) >= cfg.r_min_bps)
        hi = mid;
      else
        lo = mid;
    }
    lo = hi;
  }
  for (int i = 0; i < pol.power.rows; ++i)
    for (int k = 0; k < pol.power.cols; ++k) pol.power(i, k) *= lo;
}

}  // namespace

// With the schedule and powers settled, each receiver's split is a plain
// one-dimensional trade: a larger harvesting share relieves the supply at the
// price of decoding bandwidth on that receiver's own subcarriers. The dual
// prices this through multipliers, which need not have converged; re-deciding
// it against the true objective costs a few rate evaluations per receiver and
// never makes the policy worse.
void polish_splits(const SystemConfig& cfg, const ChannelRealization& ch,
                   ContinuousPolicy& pol) {
  const int n_f = ch.n_subcarriers, K = ch.n_receivers;
  std::vector<char> is_delay(K, 0);
  for (int j : cfg.delay_set) is_delay[j] = 1;
  std::vector<double> pickup(K, 0.0);  // collected power times eta, split-free
  double tx = 0.0;
  for (int i = 0; i < n_f; ++i) {
    double row = 0.0;
    for (int j = 0; j < K; ++j) row += pol.power(i, j) * pol.assign(i, j);
    tx += row;
    for (int k = 0; k < K; ++k)
      pickup[k] += row * effective_gain(ch, i, k) + cfg.sigma_ant_w + ch.sigma_int_w(i, k);
  }
  for (int k = 0; k < K; ++k) pickup[k] *= cfg.eta[k];
  double s0 = cfg.p_ct_w + K * cfg.p_cr_w + cfg.eps_pa * tx;

  std::vector<double> rate(K, 0.0);
  for (int k = 0; k < K; ++k) rate[k] = receiver_rate(cfg, ch, pol, k);

  auto rate_with = [&](int k, double rho_e_val) {
    double rho = clamp(1.0 - rho_e_val, cfg.rho_i_min, cfg.rho_i_max);
    double r = 0.0;
    for (int i = 0; i < n_f; ++i) {
      if (pol.assign(i, k) <= 0.0) continue;
      r += subcarrier_rate_bps(cfg.subcarrier_bw_hz, pol.power(i, k), effective_gain(ch, i, k),
                               rho, cfg.sigma_ant_w + ch.sigma_int_w(i, k), cfg.sigma_proc_w);
    }
    return r;
  };

  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int k = 0; k < K; ++k) {
      bool scheduled = false;
      for (int i = 0; i < n_f && !scheduled; ++i) scheduled = pol.assign(i, k) > 0.0;
      double lo = cfg.rho_e_min;
      if (cfg.p_req_w[k] > 0.0) {
        if (pickup[k] <= 0.0) continue;
        lo = std::max(lo, cfg.p_req_w[k] / pickup[k]);
      }
      double hi = cfg.rho_e_max;
      if (scheduled) hi = std::min(hi, 1.0 - cfg.rho_i_min);
      if (lo > hi) continue;  // the floor eats the whole box, repairs own that

      double sum_rate = 0.0, cap = 0.0, relief = 0.0;
      for (int j = 0; j < K; ++j) {
        sum_rate += rate[j];
        cap += cfg.alpha[j] * rate[j];
        relief += pickup[j] * pol.rho_e[j];
      }
      double cur_supply = s0 - relief;
      double best_eff = cur_supply > 0.0 ? cap / cur_supply : 0.0;
      double best_rho = pol.rho_e[k], best_rate = rate[k];
      bool improved = false;
      const int grid = 48;
      for (int t = 0; t <= grid; ++t) {
        double rho = lo + (hi - lo) * t / grid;
        double r_new = rate_with(k, rho);
        if (is_delay[k] && r_new < cfg.r_min_k_bps[k]) continue;
        double sum_new = sum_rate - rate[k] + r_new;
        if (sum_new < cfg.r_min_bps) continue;
        double cap_new = cap + cfg.alpha[k] * (r_new - rate[k]);
        double supply_new = s0 - relief - pickup[k] * (rho - pol.rho_e[k]);
        if (supply_new <= 0.0) continue;
        double eff = cap_new / supply_new;
        if (eff > best_eff * (1.0 + 1e-12)) {
          best_eff = eff;
          best_rho = rho;
          best_rate = r_new;
          improved = true;
        }
      }
      if (!improved) continue;
      pol.rho_e[k] = best_rho;
      double rho_cell = clamp(1.0 - best_rho, cfg.rho_i_min, cfg.rho_i_max);
      for (int i = 0; i < n_f; ++i)
        if (pol.assign(i, k) > 0.0) pol.rho_i(i, k) = rho_cell;
      rate[k] = best_rate;
    }
  }
}

// Reassignment against the true objective. Moving a subcarrier keeps the row
// power, so the supply draw and every receiver's collected power stay put and
// a move is worth taking when the weighted rate it adds beats the one it
// removes, floors permitting. Each target is tried at its current split and
// at its harvesting floor, so a receiver parked at full harvesting can still
// win subcarriers; splits are settled exactly by the polish that follows.
void improve_schedule(const SystemConfig& cfg, const ChannelRealization& ch,
                      ContinuousPolicy& pol) {
  const int n_f = ch.n_subcarriers, K = ch.n_receivers;
  std::vector<char> is_delay(K, 0);
  for (int j : cfg.delay_set) is_delay[j] = 1;
  std::vector<double> pickup(K, 0.0);
  double tx = 0.0;
  for (int i = 0; i < n_f; ++i) {
    double row = 0.0;
    for (int j = 0; j < K; ++j) row += pol.power(i, j) * pol.assign(i, j);
    tx += row;
    for (int k = 0; k < K; ++k)
      pickup[k] += row * effective_gain(ch, i, k) + cfg.sigma_ant_w + ch.sigma_int_w(i, k);
  }
  for (int k = 0; k < K; ++k) pickup[k] *= cfg.eta[k];
  double s0 = cfg.p_ct_w + K * cfg.p_cr_w + cfg.eps_pa * tx;

  std::vector<double> rate(K, 0.0);
  for (int k = 0; k < K; ++k) rate[k] = receiver_rate(cfg, ch, pol, k);

  auto cell_rate = [&](int i, int k, double rho) {
    return subcarrier_rate_bps(cfg.subcarrier_bw_hz, pol.power(i, k), effective_gain(ch, i, k),
                               rho, cfg.sigma_ant_w + ch.sigma_int_w(i, k), cfg.sigma_proc_w);
  };
  // receiver k's rate at split rho_e_val with subcarrier extra (power p) added
  auto rate_at = [&](int k, double rho_e_val, int extra, double p) {
    double rho = clamp(1.0 - rho_e_val, cfg.rho_i_min, cfg.rho_i_max);
    double r = 0.0;
    for (int i = 0; i < n_f; ++i) {
      bool owned = pol.assign(i, k) > 0.0;
      if (!owned && i != extra) continue;
      r += subcarrier_rate_bps(cfg.subcarrier_bw_hz, owned ? pol.power(i, k) : p,
                               effective_gain(ch, i, k), rho,
                               cfg.sigma_ant_w + ch.sigma_int_w(i, k), cfg.sigma_proc_w);
    }
    return r;
  };

  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int i = 0; i < n_f; ++i) {
      int j = -1;
      for (int k = 0; k < K; ++k)
        if (pol.assign(i, k) > 0.0) j = k;
      if (j < 0 || pol.power(i, j) <= 0.0) continue;
      double p = pol.power(i, j);

      double sum_rate = 0.0, cap = 0.0, relief = 0.0;
      for (int m = 0; m < K; ++m) {
        sum_rate += rate[m];
        cap += cfg.alpha[m] * rate[m];
        relief += pickup[m] * pol.rho_e[m];
      }
      double cur_supply = s0 - relief;
      double cur_eff = cur_supply > 0.0 ? cap / cur_supply : 0.0;

      double lost = cell_rate(i, j, pol.rho_i(i, j));
      double r_j_new = std::max(rate[j] - lost, 0.0);
      if (is_delay[j] && r_j_new < cfg.r_min_k_bps[j]) continue;

      int best_k = -1;
      double best_eff = cur_eff, best_split = 0.0, best_rate_k = 0.0;
      for (int k = 0; k < K; ++k) {
        if (k == j) continue;
        double lo = cfg.rho_e_min;
        if (cfg.p_req_w[k] > 0.0) {
          if (pickup[k] <= 0.0) continue;
          lo = std::max(lo, cfg.p_req_w[k] / pickup[k]);
        }
        double hi = std::min(cfg.rho_e_max, 1.0 - cfg.rho_i_min);
        if (lo > hi) continue;
        double splits[2] = {clamp(pol.rho_e[k], lo, hi), lo};
        for (double split : splits) {
          double r_k_new = rate_at(k, split, i, p);
          if (is_delay[k] && r_k_new < cfg.r_min_k_bps[k]) continue;
          double sum_new = sum_rate - rate[j] - rate[k] + r_j_new + r_k_new;
          if (sum_new < cfg.r_min_bps) continue;
          double cap_new = cap + cfg.alpha[j] * (r_j_new - rate[j]) +
                           cfg.alpha[k] * (r_k_new - rate[k]);
          double supply_new = s0 - relief - pickup[k] * (split - pol.rho_e[k]);
          if (supply_new <= 0.0) continue;
          double eff = cap_new / supply_new;
          if (eff > best_eff * (1.0 + 1e-12)) {
            best_eff = eff;
            best_k = k;
            best_split = split;
            best_rate_k = r_k_new;
          }
        }
      }
      if (best_k < 0) continue;
      pol.assign(i, j) = 0.0;
      pol.power(i, j) = 0.0;
      pol.rho_i(i, j) = 0.0;
      pol.assign(i, best_k) = 1.0;
      pol.power(i, best_k) = p;
      pol.rho_e[best_k] = best_split;
      double rho_cell = clamp(1.0 - best_split, cfg.rho_i_min, cfg.rho_i_max);
      for (int i2 = 0; i2 < n_f; ++i2)
        if (pol.assign(i2, best_k) > 0.0) pol.rho_i(i2, best_k) = rho_cell;
      rate[j] = r_j_new;
      rate[best_k] = best_rate_k;
    }

    // pairwise exchanges: a floor can pin a receiver to the wrong subcarrier
    // in a way no single move escapes (each intermediate step breaks the
    // floor or loses capacity). Power stays with the subcarrier, so supply
    // and collected powers are unchanged and a swap is a pure capacity gain.
    auto holder = [&](int i) {
      for (int k = 0; k < K; ++k)
        if (pol.assign(i, k) > 0.0) return k;
      return -1;
    };
    auto rate_swap = [&](int k, int drop, int add, double p_add) {
      double r = 0.0;
      for (int i = 0; i < n_f; ++i) {
        if (i == drop) continue;
        bool owned = pol.assign(i, k) > 0.0;
        if (!owned && i != add) continue;
        double pw = owned ? pol.power(i, k) : p_add;
        double rho = owned ? pol.rho_i(i, k)
                           : clamp(1.0 - pol.rho_e[k], cfg.rho_i_min, cfg.rho_i_max);
        r += subcarrier_rate_bps(cfg.subcarrier_bw_hz, pw, effective_gain(ch, i, k), rho,
                                 cfg.sigma_ant_w + ch.sigma_int_w(i, k), cfg.sigma_proc_w);
      }
      return r;
    };
    for (int i = 0; i < n_f; ++i) {
      int j = holder(i);
      if (j < 0 || pol.power(i, j) <= 0.0) continue;
      for (int i2 = i + 1; i2 < n_f; ++i2) {
        int j2 = holder(i2);
        if (j2 < 0 || j2 == j || pol.power(i2, j2) <= 0.0) continue;
        double p1 = pol.power(i, j), p2 = pol.power(i2, j2);
        double r_j = rate_swap(j, i, i2, p2);
        double r_j2 = rate_swap(j2, i2, i, p1);
        if (is_delay[j] && r_j < cfg.r_min_k_bps[j]) continue;
        if (is_delay[j2] && r_j2 < cfg.r_min_k_bps[j2]) continue;
        double sum_rate = 0.0, cap = 0.0;
        for (int m = 0; m < K; ++m) {
          sum_rate += rate[m];
          cap += cfg.alpha[m] * rate[m];
        }
        double sum_new = sum_rate - rate[j] - rate[j2] + r_j + r_j2;
        if (sum_new < cfg.r_min_bps) continue;
        double cap_new = cap + cfg.alpha[j] * (r_j - rate[j]) + cfg.alpha[j2] * (r_j2 - rate[j2]);
        if (cap_new <= cap * (1.0 + 1e-12)) continue;
        pol.assign(i, j) = 0.0;
        pol.power(i, j) = 0.0;
        pol.rho_i(i, j) = 0.0;
        pol.assign(i2, j2) = 0.0;
        pol.power(i2, j2) = 0.0;
        pol.rho_i(i2, j2) = 0.0;
        pol.assign(i, j2) = 1.0;
        pol.power(i, j2) = p1;
        pol.rho_i(i, j2) = clamp(1.0 - pol.rho_e[j2], cfg.rho_i_min, cfg.rho_i_max);
        pol.assign(i2, j) = 1.0;
        pol.power(i2, j) = p2;
        pol.rho_i(i2, j) = clamp(1.0 - pol.rho_e[j], cfg.rho_i_min, cfg.rho_i_max);
        rate[j] = r_j;
        rate[j2] = r_j2;
        j = j2;  // subcarrier i changed hands
      }
    }
  }
}

ContinuousPolicy extract_primal(const SystemConfig& cfg, const ChannelRealization& ch,
                                const InnerResult& inner) {
  ContinuousPolicy pol = inner.policy;
  // zero out de-scheduled entries so metrics and checks read cleanly
  for (int i = 0; i < pol.power.rows; ++i)
    for (int k = 0; k < pol.power.cols; ++k)
      if (pol.assign(i, k) <= 0.0) {
        pol.power(i, k) = 0.0;
        pol.rho_i(i, k) = 0.0;
      }
  enforce_power_caps(cfg, pol);
  for (int pass = 0; pass < 2; ++pass) {
    repair_harvest(cfg, ch, pol);
    rebox_rho_i(cfg, pol);
    for (int k : cfg.delay_set) repair_receiver_rate(cfg, ch, pol, k, cfg.r_min_k_bps[k]);
    repair_system_rate(cfg, ch, pol);
  }
  // power moved across receivers above; re-settle the harvesting floors
  repair_harvest(cfg, ch, pol);
  rebox_rho_i(cfg, pol);
  polish_splits(cfg, ch, pol);
  improve_schedule(cfg, ch, pol);
  polish_splits(cfg, ch, pol);
  return pol;
}

RatioResult maximize_ratio(const std::function<RatioStep(double)>& inner,
                           const DinkelbachOptions& opt) {
  RatioResult res;
  res.trajectory.push_back(0.0);
  double q = 0.0;
  for (int j = 0; j < opt.max_iterations; ++j) {
    RatioStep step = inner(q);
    ++res.iterations;
    if (step.den <= 0.0) {
      res.converged = true;  // degenerate denominator, keep the current ratio
      break;
    }
    double q_next = step.num / step.den;
    if (q_next <= q) {
      // includes num <= 0 at q = 0; the surrogate cannot improve the ratio
      res.converged = true;
      break;
    }
    res.trajectory.push_back(q_next);
    double increment = q_next - q;
    q = q_next;
    if (increment <= opt.tol * std::max(q_next, DBL_MIN)) {
      res.converged = true;
      break;
    }
  }
  res.q = q;
  return res;
}

SolveReport solve_continuous(const SystemConfig& cfg, const ChannelRealization& ch) {
  SolveReport rep;
  rep.q_trajectory.push_back(0.0);
  rep.q_original_trajectory.push_back(0.0);

  MultiplierState warm;
  ContinuousPolicy best_policy;
  double q = 0.0;
  bool have_policy = false;

  for (int j = 0; j < cfg.dinkelbach.max_iterations; ++j) {
    InnerResult inner = inner_solve(cfg, ch, q, warm);
    warm = inner.multipliers;
    ContinuousPolicy pol = extract_primal(cfg, ch, inner);
    SurrogatePair sp = surrogate_pair(cfg, ch, pol);
    Metrics met = evaluate(cfg, ch, pol);

    rep.inner_iterations.push_back(inner.iterations);
    rep.dual_residual.push_back(inner.final_step);
    ++rep.outer_iterations;

    if (sp.u_tp_hat <= 0.0) {
      if (!have_policy) {
        best_policy = pol;
        have_policy = true;
        rep.q_original_trajectory.push_back(
            met.supply_power_w > 0.0 ? met.capacity_bps / met.supply_power_w : 0.0);
        rep.q_trajectory.push_back(0.0);
      }
      rep.status = "degenerate_denominator";
      break;
    }
    double q_next = sp.u_hat / sp.u_tp_hat;
    if (q_next <= q) {
      // surrogate objective cannot improve on the current ratio: converged,
      // keep the previous iterate (or this one, at the very first pass)
      if (!have_policy) {
        best_policy = pol;
        have_policy = true;
        rep.q_original_trajectory.push_back(
            met.supply_power_w > 0.0 ? met.capacity_bps / met.supply_power_w : 0.0);
        rep.q_trajectory.push_back(std::max(q_next, 0.0));
      }
      rep.status = "converged";
      break;
    }
    best_policy = pol;
    have_policy = true;
    rep.q_trajectory.push_back(q_next);
    rep.q_original_trajectory.push_back(
        met.supply_power_w > 0.0 ? met.capacity_bps / met.supply_power_w : 0.0);
    double increment = q_next - q;
    q = q_next;
    if (increment <= cfg.dinkelbach.tol * std::max(q_next, DBL_MIN)) {
      rep.status = "converged";
      break;
    }
    if (j + 1 == cfg.dinkelbach.max_iterations) rep.status = "max_iterations";
  }
  if (rep.status.empty()) rep.status = "converged";

  rep.q_bpj = q;
  if (have_policy) {
    rep.policy = best_policy;
    rep.metrics = evaluate(cfg, ch, rep.policy);
    auto viols = check_feasible(cfg, ch, rep.policy);
    rep.feasible = viols.empty();
    rep.q_original_bpj = rep.metrics.efficiency_bpj;
    if (!rep.feasible) {
      // failure convention: zeroed capacity and efficiency for this draw
      rep.metrics.capacity_bps = 0.0;
      rep.metrics.efficiency_bpj = 0.0;
      rep.q_original_bpj = 0.0;
      rep.status = "infeasible";
    }
  } else {
    rep.policy = ContinuousPolicy(ch.n_subcarriers, ch.n_receivers);
    rep.metrics = evaluate(cfg, ch, rep.policy);
    rep.metrics.capacity_bps = 0.0;
    rep.metrics.efficiency_bpj = 0.0;
    rep.feasible = false;
    rep.status = "infeasible";
  }
  return rep;
}

namespace {

bool nearly(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-9 * (std::abs(scale) + 1.0);
}

}  // namespace

std::vector<std::string> check_report(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const SolveReport& rep) {
  std::vector<std::string> bad;
  auto flag = [&bad](const std::string& msg) { bad.push_back(msg); };

  if (rep.q_trajectory.empty() || rep.q_trajectory.front() != 0.0)
    flag("ratio trajectory must start at 0");
  for (size_t j = 1; j < rep.q_trajectory.size(); ++j)
    if (rep.q_trajectory[j] < rep.q_trajectory[j - 1]) {
      flag("ratio trajectory decreased at step " + std::to_string(j));
      break;
    }
  if (rep.q_trajectory.size() != rep.q_original_trajectory.size())
    flag("trajectory lengths disagree");
  if ((int)rep.q_trajectory.size() > cfg.dinkelbach.max_iterations + 1)
    flag("trajectory longer than the iteration cap allows");
  if ((int)rep.inner_iterations.size() != rep.outer_iterations ||
      (int)rep.dual_residual.size() != rep.outer_iterations)
    flag("per-pass diagnostics out of sync with outer_iterations");
  if (!rep.q_trajectory.empty() && !nearly(rep.q_bpj, rep.q_trajectory.back(), rep.q_bpj))
    flag("reported ratio is not the last trajectory entry");

  const Grid& s = rep.policy.assign;
  if (s.rows != ch.n_subcarriers || s.cols != ch.n_receivers) {
    flag("assignment grid has the wrong shape");
  } else {
    for (int i = 0; i < s.rows; ++i) {
      double row = 0.0;
      for (int k = 0; k < s.cols; ++k) {
        double v = s(i, k);
        if (v != 0.0 && v != 1.0) flag("assignment entry not Boolean");
        row += v;
      }
      if (row > 1.0) flag("subcarrier " + std::to_string(i) + " assigned more than once");
    }
    for (int i = 0; i < s.rows; ++i)
      for (int k = 0; k < s.cols; ++k)
        if (s(i, k) == 0.0 && rep.policy.power(i, k) != 0.0)
          flag("power on an unassigned subcarrier");
  }

  bool clean = check_feasible(cfg, ch, rep.policy).empty();
  if (rep.feasible != clean) flag("feasible flag disagrees with the constraint check");
  if (rep.feasible && rep.status == "infeasible") flag("feasible run labeled infeasible");

  Metrics fresh = evaluate(cfg, ch, rep.policy);
  if (!nearly(rep.metrics.transmit_power_w, fresh.transmit_power_w, fresh.transmit_power_w))
    flag("transmit power does not match the policy");
  if (!nearly(rep.metrics.harvested_w_total, fresh.harvested_w_total, fresh.harvested_w_total))
    flag("harvested power does not match the policy");
  if (rep.feasible) {
    if (!nearly(rep.metrics.capacity_bps, fresh.capacity_bps, fresh.capacity_bps))
      flag("capacity does not match the policy");
    if (!nearly(rep.q_original_bpj, rep.metrics.efficiency_bpj, rep.q_original_bpj))
      flag("true efficiency out of sync with metrics");
  } else {
    if (rep.metrics.capacity_bps != 0.0 || rep.metrics.efficiency_bpj != 0.0 ||
        rep.q_original_bpj != 0.0)
      flag("infeasible run must report zeroed capacity and efficiency");
  }
  return bad;
}

}  // namespace swipt
