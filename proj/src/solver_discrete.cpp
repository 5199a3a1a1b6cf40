#include "swipt/solver_discrete.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace swipt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01cap(double x, double cap) { return std::min(std::max(x, 0.0), cap); }
}  // namespace

double energy_mode_score(const SystemConfig& cfg, const ChannelRealization& ch,
                         const DiscreteMultiplierState& m, int k, int b, double q) {
  double rho_e = cfg.modes_e[b];
  if (rho_e <= 0.0 && cfg.p_req_w[k] > 0.0) return -kInf;  // floor needs a live split
  double noise_sum = 0.0, delta_sum = 0.0, kappa_sum = 0.0;
  const int n_f = ch.n_subcarriers, N = static_cast<int>(cfg.modes_i.size());
  for (int i = 0; i < n_f; ++i) {
    noise_sum += cfg.sigma_ant_w + ch.sigma_int_w(i, k);
    kappa_sum += m.kappa(i, k, b);
    for (int n = 0; n < N; ++n) delta_sum += m.delta(i, k, n);
  }
  double score = rho_e * (q * cfg.eta[k] * noise_sum - delta_sum - kappa_sum);
  if (cfg.p_req_w[k] > 0.0) score -= m.w(k, b) * cfg.p_req_w[k] / rho_e;
  return score;
}

namespace {

struct DWorkspace {
  const SystemConfig& cfg;
  const ChannelRealization& ch;
  int n_f, K, N;
  Grid sigma_bar;
  std::vector<double> noise_sum;  // per k, antenna + interference over the band
  std::vector<char> delay;

  DWorkspace(const SystemConfig& c, const ChannelRealization& r)
      : cfg(c), ch(r), n_f(r.n_subcarriers), K(r.n_receivers),
        N(static_cast<int>(c.modes_i.size())), sigma_bar(n_f, K), noise_sum(K, 0.0),
        delay(K, 0) {
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < n_f; ++i) {
        sigma_bar(i, k) = c.sigma_ant_w + r.sigma_int_w(i, k);
        noise_sum[k] += sigma_bar(i, k);
      }
    for (int k : c.delay_set) delay[k] = 1;
  }
};

struct DLevel1 {
  Grid3 power;   // per-use watts, identical across modes
  Grid3 assign;  // info selection, at most one (k,n) per subcarrier
  Grid e_select;
  std::vector<double> a, phi;

  DLevel1(int n_f, int k, int n)
      : power(n_f, k, n), assign(n_f, k, n), e_select(k, n), a(k), phi(n_f) {}
};

DLevel1 dlevel1_solve(const DWorkspace& ws, double q, const DiscreteMultiplierState& m) {
  const SystemConfig& cfg = ws.cfg;
  DLevel1 x(ws.n_f, ws.K, ws.N);
  for (int k = 0; k < ws.K; ++k) x.a[k] = cfg.alpha[k] + m.gamma + m.upsilon[k];

  for (int i = 0; i < ws.n_f; ++i) {
    double harvest = 0.0;
    for (int k = 0; k < ws.K; ++k) {
      double w_sum = 0.0;
      for (int n = 0; n < ws.N; ++n) w_sum += m.w(k, n);
      harvest += (q + w_sum) * effective_gain(ws.ch, i, k) * cfg.eta[k];
    }
    x.phi[i] = q * cfg.eps_pa + m.beta * cfg.eps_pa + m.lambda - harvest;
  }

  for (int k = 0; k < ws.K; ++k) {
    double best = -kInf;
    int winner = 0;  // all-pruned fallback: lowest level
    for (int b = 0; b < ws.N; ++b) {
      double t = energy_mode_score(cfg, ws.ch, m, k, b, q);
      if (t > best) {
        best = t;
        winner = b;
      }
    }
    x.e_select(k, winner) = 1.0;
  }

  for (int i = 0; i < ws.n_f; ++i) {
    double best = -kInf;
    int win_k = -1, win_n = -1;
    for (int k = 0; k < ws.K; ++k) {
      double p = best_power_w(cfg, x.a[k], x.phi[i]);
      for (int n = 0; n < ws.N; ++n) {
        x.power(i, k, n) = p;
        double kappa_sum = 0.0;
        for (int mm = 0; mm < ws.N; ++mm) kappa_sum += m.kappa(i, k, mm);
        double metric = assignment_metric(cfg, x.a[k], p, effective_gain(ws.ch, i, k),
                                          cfg.modes_i[n], ws.sigma_bar(i, k));
        if (metric > -kInf)
          metric -= (m.delta(i, k, n) + kappa_sum) * cfg.modes_i[n];
        if (metric > best) {
          best = metric;
          win_k = k;
          win_n = n;
        }
      }
    }
    if (win_k >= 0 && best > -kInf) x.assign(i, win_k, win_n) = 1.0;
  }
  return x;
}

struct DSlacks {
  double lambda = 0.0, beta = 0.0, gamma = 0.0;
  std::vector<double> upsilon;
  Grid w;
  Grid3 delta, kappa;

  DSlacks(int n_f, int k, int n)
      : upsilon(k, 0.0), w(k, n), delta(n_f, k, n), kappa(n_f, k, n) {}
};

double selected_rho_e(const DWorkspace& ws, const DLevel1& x, int k) {
  double v = 0.0;
  for (int n = 0; n < ws.N; ++n) v += x.e_select(k, n) * ws.cfg.modes_e[n];
  return v;
}

DSlacks compute_dslacks(const DWorkspace& ws, const DLevel1& x) {
  const SystemConfig& cfg = ws.cfg;
  DSlacks g(ws.n_f, ws.K, ws.N);
  double transmit = 0.0, rate_total = 0.0;
  std::vector<double> row_power(ws.n_f, 0.0);
  for (int i = 0; i < ws.n_f; ++i)
    for (int k = 0; k < ws.K; ++k)
      for (int n = 0; n < ws.N; ++n) {
        double p = x.power(i, k, n) * x.assign(i, k, n);
        transmit += p;
        row_power[i] += p;
      }
  g.lambda = cfg.p_max_w - transmit;
  g.beta = cfg.p_pg_w - cfg.p_ct_w - cfg.eps_pa * transmit;

  for (int k = 0; k < ws.K; ++k) {
    double rho_e_sel = selected_rho_e(ws, x, k);
    double pickup = 0.0, rate_k = 0.0;
    for (int i = 0; i < ws.n_f; ++i) {
      pickup += row_power[i] * effective_gain(ws.ch, i, k);
      double rho_i_sel = 0.0;
      for (int n = 0; n < ws.N; ++n) rho_i_sel += cfg.modes_i[n] * x.assign(i, k, n);
      for (int n = 0; n < ws.N; ++n) {
        if (x.assign(i, k, n) > 0.0) {
          double r =
              approx_rate_bps(cfg.subcarrier_bw_hz, x.power(i, k, n),
                              effective_gain(ws.ch, i, k), cfg.modes_i[n],
                              ws.sigma_bar(i, k), cfg.sigma_proc_w);
          if (r > -kInf) rate_k += r;
        }
        g.delta(i, k, n) = 1.0 - cfg.modes_i[n] * x.assign(i, k, n) - rho_e_sel;
        g.kappa(i, k, n) = 1.0 - rho_i_sel - cfg.modes_e[n] * x.e_select(k, n);
      }
    }
    rate_total += rate_k;
    if (ws.delay[k]) g.upsilon[k] = rate_k - cfg.r_min_k_bps[k];
    for (int n = 0; n < ws.N; ++n) {
      double floor = 0.0;
      if (x.e_select(k, n) > 0.0 && cfg.p_req_w[k] > 0.0)
        floor = cfg.p_req_w[k] / std::max(cfg.modes_e[n], 1e-12);
      g.w(k, n) = (pickup + ws.noise_sum[k]) * cfg.eta[k] - floor;
    }
  }
  g.gamma = rate_total - cfg.r_min_bps;
  return g;
}

double dual_value_discrete(const DWorkspace& ws, double q, const DiscreteMultiplierState& m,
                           const DLevel1& x) {
  const SystemConfig& cfg = ws.cfg;
  double value = 0.0, transmit = 0.0;
  std::vector<double> row_power(ws.n_f, 0.0);
  for (int i = 0; i < ws.n_f; ++i)
    for (int k = 0; k < ws.K; ++k)
      for (int n = 0; n < ws.N; ++n) {
        double p = x.power(i, k, n) * x.assign(i, k, n);
        transmit += p;
        row_power[i] += p;
      }
  double harvest_hat = 0.0;
  for (int k = 0; k < ws.K; ++k) {
    double rho_e_sel = selected_rho_e(ws, x, k);
    double pickup = 0.0, rate_k = 0.0;
    for (int i = 0; i < ws.n_f; ++i) {
      pickup += row_power[i] * effective_gain(ws.ch, i, k);
      double rho_i_sel = 0.0;
      for (int n = 0; n < ws.N; ++n) rho_i_sel += cfg.modes_i[n] * x.assign(i, k, n);
      for (int n = 0; n < ws.N; ++n) {
        if (x.assign(i, k, n) > 0.0) {
          double r =
              approx_rate_bps(cfg.subcarrier_bw_hz, x.power(i, k, n),
                              effective_gain(ws.ch, i, k), cfg.modes_i[n],
                              ws.sigma_bar(i, k), cfg.sigma_proc_w);
          if (r > -kInf) rate_k += r;
        }
        value -= m.delta(i, k, n) * (cfg.modes_i[n] * x.assign(i, k, n) + rho_e_sel - 1.0);
        value -= m.kappa(i, k, n) * (rho_i_sel + cfg.modes_e[n] * x.e_select(k, n) - 1.0);
      }
    }
    value += x.a[k] * rate_k;
    harvest_hat += cfg.eta[k] * (pickup + rho_e_sel * ws.noise_sum[k]);
    for (int n = 0; n < ws.N; ++n) {
      double floor = 0.0;
      if (x.e_select(k, n) > 0.0 && cfg.p_req_w[k] > 0.0)
        floor = cfg.p_req_w[k] / std::max(cfg.modes_e[n], 1e-12);
      value -= m.w(k, n) * (floor - (pickup + ws.noise_sum[k]) * cfg.eta[k]);
    }
    if (ws.delay[k]) value -= m.upsilon[k] * cfg.r_min_k_bps[k];
  }
  value -= m.lambda * (transmit - cfg.p_max_w);
  value -= q * (cfg.p_ct_w + ws.K * cfg.p_cr_w + cfg.eps_pa * transmit - harvest_hat);
  value -= m.gamma * cfg.r_min_bps;
  value -= m.beta * (cfg.p_ct_w + cfg.eps_pa * transmit - cfg.p_pg_w);
  return value;
}

struct DStepScales {
  double lambda = 0.0, beta = 0.0, gamma = 0.0;
  std::vector<double> upsilon;
  Grid w;
  Grid3 delta, kappa;

  DStepScales(int n_f, int k, int n)
      : upsilon(k, 0.0), w(k, n), delta(n_f, k, n), kappa(n_f, k, n) {}
};

DStepScales dstep_scales(const DWorkspace& ws, double q, const DiscreteMultiplierState& m) {
  const SystemConfig& cfg = ws.cfg;
  DStepScales s(ws.n_f, ws.K, ws.N);
  double rate_cap = ws.n_f * cfg.subcarrier_bw_hz;
  double mean_alpha = std::accumulate(cfg.alpha.begin(), cfg.alpha.end(), 0.0) / ws.K;
  s.lambda = (m.lambda + cfg.eps_pa * (q + 1.0) + 1.0) / cfg.p_max_w;
  s.beta = (m.beta + cfg.eps_pa * (q + 1.0) + 1.0) /
           std::max(cfg.p_pg_w - cfg.p_ct_w, 0.1 * cfg.p_pg_w);
  s.gamma = (m.gamma + mean_alpha) / std::max(cfg.r_min_bps, rate_cap);
  for (int k = 0; k < ws.K; ++k) {
    double a_k = cfg.alpha[k] + m.gamma + m.upsilon[k];
    s.upsilon[k] = (m.upsilon[k] + cfg.alpha[k]) / std::max(cfg.r_min_k_bps[k], rate_cap);
    for (int n = 0; n < ws.N; ++n) {
      s.w(k, n) = (m.w(k, n) + q + 1.0) / std::max(cfg.p_req_w[k], 1e-3);
      for (int i = 0; i < ws.n_f; ++i) {
        double wa = cfg.subcarrier_bw_hz * a_k;
        s.delta(i, k, n) = m.delta(i, k, n) + wa + 1.0;
        s.kappa(i, k, n) = m.kappa(i, k, n) + wa + 1.0;
      }
    }
  }
  return s;
}

DiscreteMultiplierState dapply_step(const DWorkspace& ws, const DiscreteMultiplierState& m,
                                    const DSlacks& g, const DStepScales& s, double theta) {
  DiscreteMultiplierState out = m;
  auto pos = [](double v) { return std::max(v, 0.0); };
  out.lambda = pos(m.lambda - theta * s.lambda * g.lambda);
  out.beta = pos(m.beta - theta * s.beta * g.beta);
  out.gamma = pos(m.gamma - theta * s.gamma * g.gamma);
  for (int k = 0; k < ws.K; ++k) {
    if (ws.delay[k]) out.upsilon[k] = pos(m.upsilon[k] - theta * s.upsilon[k] * g.upsilon[k]);
    for (int n = 0; n < ws.N; ++n) {
      if (ws.cfg.p_req_w[k] > 0.0)
        out.w(k, n) = pos(m.w(k, n) - theta * s.w(k, n) * g.w(k, n));
      for (int i = 0; i < ws.n_f; ++i) {
        out.delta(i, k, n) = pos(m.delta(i, k, n) - theta * s.delta(i, k, n) * g.delta(i, k, n));
        out.kappa(i, k, n) = pos(m.kappa(i, k, n) - theta * s.kappa(i, k, n) * g.kappa(i, k, n));
      }
    }
  }
  return out;
}

double ddirectional_sq(const DWorkspace& ws, const DSlacks& g, const DStepScales& s) {
  double dd = s.lambda * g.lambda * g.lambda + s.beta * g.beta * g.beta +
              s.gamma * g.gamma * g.gamma;
  for (int k = 0; k < ws.K; ++k) {
    if (ws.delay[k]) dd += s.upsilon[k] * g.upsilon[k] * g.upsilon[k];
    for (int n = 0; n < ws.N; ++n) {
      if (ws.cfg.p_req_w[k] > 0.0) dd += s.w(k, n) * g.w(k, n) * g.w(k, n);
      for (int i = 0; i < ws.n_f; ++i) {
        dd += s.delta(i, k, n) * g.delta(i, k, n) * g.delta(i, k, n);
        dd += s.kappa(i, k, n) * g.kappa(i, k, n) * g.kappa(i, k, n);
      }
    }
  }
  return dd;
}

double drelative_change(const DWorkspace& ws, const DiscreteMultiplierState& a,
                        const DiscreteMultiplierState& b, const DStepScales& s) {
  auto rel = [](double x, double y, double scale) {
    return std::abs(x - y) / (std::abs(x) + 1e-6 * scale + DBL_MIN);
  };
  double r = rel(a.lambda, b.lambda, s.lambda);
  r = std::max(r, rel(a.beta, b.beta, s.beta));
  r = std::max(r, rel(a.gamma, b.gamma, s.gamma));
  for (int k = 0; k < ws.K; ++k) {
    r = std::max(r, rel(a.upsilon[k], b.upsilon[k], s.upsilon[k]));
    for (int n = 0; n < ws.N; ++n) {
      r = std::max(r, rel(a.w(k, n), b.w(k, n), s.w(k, n)));
      for (int i = 0; i < ws.n_f; ++i) {
        r = std::max(r, rel(a.delta(i, k, n), b.delta(i, k, n), s.delta(i, k, n)));
        r = std::max(r, rel(a.kappa(i, k, n), b.kappa(i, k, n), s.kappa(i, k, n)));
      }
    }
  }
  return r;
}

DiscreteMultiplierState dinitial_multipliers(const DWorkspace& ws) {
  DiscreteMultiplierState m(ws.n_f, ws.K, ws.N);
  m.lambda = m.beta = m.gamma = 0.1;
  for (int k = 0; k < ws.K; ++k) {
    if (ws.delay[k]) m.upsilon[k] = 0.1;
    for (int n = 0; n < ws.N; ++n) {
      if (ws.cfg.p_req_w[k] > 0.0) m.w(k, n) = 0.1;
      for (int i = 0; i < ws.n_f; ++i) {
        m.delta(i, k, n) = 1.0;
        m.kappa(i, k, n) = 1.0;
      }
    }
  }
  return m;
}

bool dstate_empty(const DiscreteMultiplierState& m) { return m.delta.d0 == 0; }

}  // namespace

DiscreteInnerResult inner_solve_discrete(const SystemConfig& cfg, const ChannelRealization& ch,
                                         double q, const DiscreteMultiplierState& warm) {
  DWorkspace ws(cfg, ch);
  DiscreteMultiplierState m = dstate_empty(warm) ? dinitial_multipliers(ws) : warm;
  const DualOptions& opt = cfg.dual;

  DLevel1 x = dlevel1_solve(ws, q, m);
  double d_cur = dual_value_discrete(ws, q, m, x);
  int it = 0;
  double last_rel = kInf;
  for (; it < opt.max_iterations; ++it) {
    DSlacks g = compute_dslacks(ws, x);
    DStepScales s = dstep_scales(ws, q, m);
    double dd = ddirectional_sq(ws, g, s);

    double theta = opt.step0;
    DiscreteMultiplierState cand;
    DLevel1 x_cand(0, 0, 0);
    double d_cand = 0.0;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      cand = dapply_step(ws, m, g, s, theta);
      x_cand = dlevel1_solve(ws, q, cand);
      d_cand = dual_value_discrete(ws, q, cand, x_cand);
      if (d_cand <= d_cur - opt.armijo_c * theta * dd) break;
      theta *= opt.shrink;
    }
    last_rel = drelative_change(ws, m, cand, s);
    m = std::move(cand);
    x = std::move(x_cand);
    d_cur = d_cand;
    if (last_rel < opt.tol) {
      ++it;
      break;
    }
  }

  DiscreteInnerResult res;
  res.policy = DiscretePolicy(ws.n_f, ws.K, ws.N);
  res.policy.power = x.power;
  res.policy.assign = x.assign;
  res.policy.e_select = x.e_select;
  res.policy.modes_e = cfg.modes_e;
  res.policy.modes_i = cfg.modes_i;
  res.multipliers = m;
  res.iterations = it;
  res.final_step = last_rel;
  res.dual_value = d_cur;
  return res;
}

namespace {

double policy_rho_e(const DiscretePolicy& pol, int k) {
  double v = 0.0;
  for (size_t n = 0; n < pol.modes_e.size(); ++n) v += pol.e_select(k, (int)n) * pol.modes_e[n];
  return v;
}

// Largest information level fitting beside the receiver's energy level; -1
// when none does.
int best_compatible_mode(const DiscretePolicy& pol, double rho_e) {
  int best = -1;
  double best_v = -1.0;
  for (size_t n = 0; n < pol.modes_i.size(); ++n) {
    double v = pol.modes_i[n];
    if (v <= 0.0) continue;
    if (v + rho_e <= 1.0 + 1e-12 && v > best_v) {
      best_v = v;
      best = (int)n;
    }
  }
  return best;
}

// Re-pick each assigned subcarrier's information level to fit the energy mode.
void snap_info_modes(DiscretePolicy& pol) {
  const int n_f = pol.assign.d0, K = pol.assign.d1, N = pol.assign.d2;
  for (int i = 0; i < n_f; ++i)
    for (int k = 0; k < K; ++k) {
      int cur = -1;
      for (int n = 0; n < N; ++n)
        if (pol.assign(i, k, n) > 0.0) cur = n;
      if (cur < 0) continue;
      double rho_e = policy_rho_e(pol, k);
      if (pol.modes_i[cur] + rho_e <= 1.0 + 1e-12 && pol.modes_i[cur] > 0.0) continue;
      int pick = best_compatible_mode(pol, rho_e);
      pol.assign(i, k, cur) = 0.0;
      if (pick >= 0) pol.assign(i, k, pick) = 1.0;
    }
}

double total_transmit(const DiscretePolicy& pol) {
  double t = 0.0;
  for (int i = 0; i < pol.power.d0; ++i)
    for (int k = 0; k < pol.power.d1; ++k)
      for (int n = 0; n < pol.power.d2; ++n) t += pol.power(i, k, n) * pol.assign(i, k, n);
  return t;
}

void enforce_power_caps_d(const SystemConfig& cfg, DiscretePolicy& pol) {
  double total = total_transmit(pol);
  if (total <= 0.0) return;
  double cap = std::min(cfg.p_max_w, (cfg.p_pg_w - cfg.p_ct_w) / cfg.eps_pa);
  if (total > cap) {
    double scale = cap / total;
    for (auto& v : pol.power.v) v *= scale;
  }
}

// Smallest level covering the harvesting floor under the current schedule,
// spending spare supply power first when no level alone can reach it.
void repair_harvest_d(const SystemConfig& cfg, const ChannelRealization& ch,
                      DiscretePolicy& pol) {
  const int n_f = pol.assign.d0, K = pol.assign.d1, N = pol.assign.d2;
  double cap = std::min(cfg.p_max_w, (cfg.p_pg_w - cfg.p_ct_w) / cfg.eps_pa);
  std::vector<char> is_delay(K, 0);
  for (int j : cfg.delay_set) is_delay[j] = 1;
  bool changed = false;
  for (int k = 0; k < K; ++k) {
    if (cfg.p_req_w[k] <= 0.0) continue;
    bool scheduled = false;
    for (int i = 0; i < n_f && !scheduled; ++i)
      for (int n = 0; n < N && !scheduled; ++n) scheduled = pol.assign(i, k, n) > 0.0;
    // the level may not crowd the receiver's own decoding out of the mode
    // set, and a rate-floored receiver keeps some working room on top
    double room = 0.0;
    if (scheduled) {
      room = 1.0;
      for (double v : pol.modes_i)
        if (v > 0.0) room = std::min(room, v);
    }
    if (is_delay[k] && cfg.r_min_k_bps[k] > 0.0) room = std::max(room, 0.1);
    double ceiling = 0.0;
    for (double v : pol.modes_e)
      if (v + room <= 1.0 + 1e-12) ceiling = std::max(ceiling, v);
    double pickup = 0.0;
    for (int i = 0; i < n_f; ++i) {
      double row = 0.0;
      for (int j = 0; j < K; ++j)
        for (int n = 0; n < N; ++n) row += pol.power(i, j, n) * pol.assign(i, j, n);
      pickup += row * effective_gain(ch, i, k) + cfg.sigma_ant_w + ch.sigma_int_w(i, k);
    }
    if (cfg.eta[k] > 0.0 && ceiling > 0.0 &&
        pickup * cfg.eta[k] * ceiling < cfg.p_req_w[k]) {
      // small overshoot so the level pick does not jump past the ceiling on
      // rounding alone
      double target = cfg.p_req_w[k] / (cfg.eta[k] * ceiling) * (1.0 + 1e-6);
      struct Cell {
        double g;
        int i, j, n;
      };
      std::vector<Cell> cells;
      for (int i = 0; i < n_f; ++i) {
        double g = effective_gain(ch, i, k);
        if (g <= 0.0) continue;
        for (int j = 0; j < K; ++j)
          for (int n = 0; n < N; ++n)
            if (pol.assign(i, j, n) > 0.0) cells.push_back({g, i, j, n});
      }
      std::sort(cells.begin(), cells.end(),
                [](const Cell& a, const Cell& b) { return a.g > b.g; });
      for (const Cell& c : cells) {
        if (pickup >= target) break;
        double headroom = std::max(cap - total_transmit(pol), 0.0);
        if (headroom <= 0.0) break;
        double add = std::min((target - pickup) / c.g, headroom);
        // all slots, so the boost survives a later info-mode re-snap
        for (int n = 0; n < N; ++n) pol.power(c.i, c.j, n) += add;
        pickup += add * c.g;
      }
    }
    pickup *= cfg.eta[k];
    if (pickup <= 0.0) continue;  // floor unreachable, the final check flags it
    double needed = cfg.p_req_w[k] / pickup;
    if (policy_rho_e(pol, k) >= needed) continue;
    // smallest sufficient level, otherwise the largest available one
    int pick = -1;
    double pick_v = kInf, max_v = -1.0;
    int max_b = 0;
    for (int b = 0; b < N; ++b) {
      double v = pol.modes_e[b];
      if (v > max_v) {
        max_v = v;
        max_b = b;
      }
      if (v >= needed && v < pick_v) {
        pick_v = v;
        pick = b;
      }
    }
    if (pick < 0) pick = max_b;
    for (int b = 0; b < N; ++b) pol.e_select(k, b) = 0.0;
    pol.e_select(k, pick) = 1.0;
    changed = true;
  }
  if (changed) snap_info_modes(pol);
}

double receiver_rate_d(const SystemConfig& cfg, const ChannelRealization& ch,
                       const DiscretePolicy& pol, int k) {
  double r = 0.0;
  for (int i = 0; i < pol.assign.d0; ++i)
    for (int n = 0; n < pol.assign.d2; ++n)
      if (pol.assign(i, k, n) > 0.0)
        r += subcarrier_rate_bps(cfg.subcarrier_bw_hz, pol.power(i, k, n),
                                 effective_gain(ch, i, k), pol.modes_i[n],
                                 cfg.sigma_ant_w + ch.sigma_int_w(i, k), cfg.sigma_proc_w);
  return r;
}

void repair_receiver_rate_d(const SystemConfig& cfg, const ChannelRealization& ch,
                            DiscretePolicy& pol, int k, double target_bps) {
  double rate = receiver_rate_d(cfg, ch, pol, k);
  if (rate >= target_bps) return;
  const int n_f = pol.assign.d0, K = pol.assign.d1, N = pol.assign.d2;
  std::vector<char> is_delay(K, 0);
  for (int j : cfg.delay_set) is_delay[j] = 1;
  double cap = std::min(cfg.p_max_w, (cfg.p_pg_w - cfg.p_ct_w) / cfg.eps_pa);
  // a harvesting level at the top of the set crowds decoding out entirely;
  // drop to the smallest level the harvest floor actually needs
  {
    double pickup = 0.0;
    for (int i = 0; i < n_f; ++i) {
      double row = 0.0;
      for (int j = 0; j < K; ++j)
        for (int n = 0; n < N; ++n) row += pol.power(i, j, n) * pol.assign(i, j, n);
      pickup += row * effective_gain(ch, i, k) + cfg.sigma_ant_w + ch.sigma_int_w(i, k);
    }
    pickup *= cfg.eta[k];
    double needed = 0.0;
    if (cfg.p_req_w[k] > 0.0)
      needed = pickup > 0.0 ? cfg.p_req_w[k] / pickup : policy_rho_e(pol, k);
    int pick = -1;
    double pick_v = kInf;
    for (int b = 0; b < N; ++b) {
      double v = pol.modes_e[b];
      if (v >= needed - 1e-12 && v < pick_v) {
        pick_v = v;
        pick = b;
      }
    }
    if (pick >= 0 && pick_v < policy_rho_e(pol, k)) {
      for (int b = 0; b < N; ++b) pol.e_select(k, b) = 0.0;
      pol.e_select(k, pick) = 1.0;
      snap_info_modes(pol);
      rate = receiver_rate_d(cfg, ch, pol, k);
      if (rate >= target_bps) return;
    }
  }
  int my_mode = best_compatible_mode(pol, policy_rho_e(pol, k));
  if (my_mode < 0) return;  // no usable split, the final check decides
  double my_rho = pol.modes_i[my_mode];

  auto fallback_power = [&]() {
    double p = 0.0;
    for (int i2 = 0; i2 < n_f; ++i2)
      for (int n = 0; n < N; ++n) p = std::max(p, pol.power(i2, k, n) * pol.assign(i2, k, n));
    if (p <= 0.0) p = cfg.p_max_w / n_f;
    return std::min(p, std::max(cap - total_transmit(pol), 0.0));
  };

  struct Candidate {
    double cost, gain;
    int i, holder, holder_n;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < n_f; ++i) {
    bool mine = false;
    for (int n = 0; n < N; ++n)
      if (pol.assign(i, k, n) > 0.0) mine = true;
    if (mine) continue;
    int holder = -1, holder_n = -1;
    for (int j = 0; j < K; ++j)
      for (int n = 0; n < N; ++n)
        if (pol.assign(i, j, n) > 0.0) {
          holder = j;
          holder_n = n;
        }
    double p = holder >= 0 ? pol.power(i, holder, holder_n) : fallback_power();
    if (p <= 0.0) continue;
    double gain = subcarrier_rate_bps(cfg.subcarrier_bw_hz, p, effective_gain(ch, i, k),
                                      my_rho, cfg.sigma_ant_w + ch.sigma_int_w(i, k),
                                      cfg.sigma_proc_w);
    if (gain <= 0.0) continue;
    double cost = 0.0;
    if (holder >= 0)
      cost = cfg.alpha[holder] *
             subcarrier_rate_bps(cfg.subcarrier_bw_hz, p, effective_gain(ch, i, holder),
                                 pol.modes_i[holder_n],
                                 cfg.sigma_ant_w + ch.sigma_int_w(i, holder), cfg.sigma_proc_w);
    cands.push_back({cost, gain, i, holder, holder_n});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.gain != b.gain) return a.gain > b.gain;
    return a.i < b.i;
  });
  for (const Candidate& c : cands) {
    if (rate >= target_bps) break;
    if (c.holder >= 0 && is_delay[c.holder]) {
      double lost = subcarrier_rate_bps(
          cfg.subcarrier_bw_hz, pol.power(c.i, c.holder, c.holder_n),
          effective_gain(ch, c.i, c.holder), pol.modes_i[c.holder_n],
          cfg.sigma_ant_w + ch.sigma_int_w(c.i, c.holder), cfg.sigma_proc_w);
      if (receiver_rate_d(cfg, ch, pol, c.holder) - lost < cfg.r_min_k_bps[c.holder]) continue;
    }
    double p = c.holder >= 0 ? pol.power(c.i, c.holder, c.holder_n) : fallback_power();
    if (p <= 0.0) continue;
    if (c.holder >= 0) pol.assign(c.i, c.holder, c.holder_n) = 0.0;
    pol.assign(c.i, k, my_mode) = 1.0;
    for (int n = 0; n < N; ++n) pol.power(c.i, k, n) = p;
    rate = receiver_rate_d(cfg, ch, pol, k);
  }
  if (rate >= target_bps) return;
  // last resort: spend spare supply power on this receiver's own subcarriers
  struct Own {
    double g;
    int i, n;
  };
  std::vector<Own> own;
  for (int i = 0; i < n_f; ++i)
    for (int n = 0; n < N; ++n)
      if (pol.assign(i, k, n) > 0.0) own.push_back({effective_gain(ch, i, k), i, n});
  std::sort(own.begin(), own.end(), [](const Own& a, const Own& b) { return a.g > b.g; });
  for (const Own& c : own) {
    if (rate >= target_bps) break;
    double headroom = std::max(cap - total_transmit(pol), 0.0);
    if (headroom <= 0.0) break;
    double lo_p = pol.power(c.i, k, c.n);
    double hi_p = std::min(cfg.p_max_w, lo_p + headroom);
    if (hi_p <= lo_p) continue;
    for (int n = 0; n < N; ++n) pol.power(c.i, k, n) = hi_p;
    double r_hi = receiver_rate_d(cfg, ch, pol, k);
    if (r_hi < target_bps) {
      rate = r_hi;  // keep the whole boost and try the next one
      continue;
    }
    for (int it = 0; it < 60 && hi_p - lo_p > 1e-12 * hi_p; ++it) {
      double mid = 0.5 * (lo_p + hi_p);
      for (int n = 0; n < N; ++n) pol.power(c.i, k, n) = mid;
      if (receiver_rate_d(cfg, ch, pol, k) >= target_bps)
        hi_p = mid;
      else
        lo_p = mid;
    }
    for (int n = 0; n < N; ++n) pol.power(c.i, k, n) = hi_p;
    rate = receiver_rate_d(cfg, ch, pol, k);
  }
}

void repair_system_rate_d(const SystemConfig& cfg, const ChannelRealization& ch,
                          DiscretePolicy& pol) {
  if (cfg.r_min_bps <= 0.0) return;
  auto total_rate = [&](const DiscretePolicy& p) {
    double r = 0.0;
    for (int k = 0; k < p.assign.d1; ++k) r += receiver_rate_d(cfg, ch, p, k);
    return r;
  };
  if (total_rate(pol) >= cfg.r_min_bps) return;
  double total = total_transmit(pol);
  if (total <= 0.0) return;
  double cap = std::min(cfg.p_max_w, (cfg.p_pg_w - cfg.p_ct_w) / cfg.eps_pa);
  double max_scale = cap / total;
  for (int i = 0; i < pol.power.d0; ++i)
    for (int k = 0; k < pol.power.d1; ++k)
      for (int n = 0; n < pol.power.d2; ++n)
        if (pol.assign(i, k, n) > 0.0 && pol.power(i, k, n) > 0.0)
          max_scale = std::min(max_scale, cfg.p_max_w / pol.power(i, k, n));
  if (max_scale <= 1.0) return;
  auto rate_at = [&](double scale) {
    DiscretePolicy tmp = pol;
    for (auto& v : tmp.power.v) v *= scale;
    return total_rate(tmp);
  };
  double lo = 1.0, hi = max_scale;
  if (rate_at(hi) < cfg.r_min_bps) {
    lo = hi;
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
  for (auto& v : pol.power.v) v *= lo;
}

// Same one-dimensional re-decision as the continuous extraction, over the
// level set: each receiver's harvesting level trades decoding bandwidth on
// its own subcarriers against supply relief, and the dual prices that made
// the inner choice need not have converged. Never makes the policy worse.
void polish_splits_d(const SystemConfig& cfg, const ChannelRealization& ch,
                     DiscretePolicy& pol) {
  const int n_f = pol.assign.d0, K = pol.assign.d1, N = pol.assign.d2;
  std::vector<char> is_delay(K, 0);
  for (int j : cfg.delay_set) is_delay[j] = 1;
  std::vector<double> pickup(K, 0.0);
  double tx = 0.0;
  for (int i = 0; i < n_f; ++i) {
    double row = 0.0;
    for (int j = 0; j < K; ++j)
      for (int n = 0; n < N; ++n) row += pol.power(i, j, n) * pol.assign(i, j, n);
    tx += row;
    for (int k = 0; k < K; ++k)
      pickup[k] += row * effective_gain(ch, i, k) + cfg.sigma_ant_w + ch.sigma_int_w(i, k);
  }
  for (int k = 0; k < K; ++k) pickup[k] *= cfg.eta[k];
  double s0 = cfg.p_ct_w + K * cfg.p_cr_w + cfg.eps_pa * tx;

  std::vector<double> rate(K, 0.0);
  for (int k = 0; k < K; ++k) rate[k] = receiver_rate_d(cfg, ch, pol, k);

  // rate if receiver k moved to harvesting level rho, info level re-picked
  auto rate_with = [&](int k, double rho) {
    int m = best_compatible_mode(pol, rho);
    if (m < 0) return 0.0;
    double v = pol.modes_i[m];
    double r = 0.0;
    for (int i = 0; i < n_f; ++i)
      for (int n = 0; n < N; ++n)
        if (pol.assign(i, k, n) > 0.0)
          r += subcarrier_rate_bps(cfg.subcarrier_bw_hz, pol.power(i, k, n),
                                   effective_gain(ch, i, k), v,
                                   cfg.sigma_ant_w + ch.sigma_int_w(i, k), cfg.sigma_proc_w);
    return r;
  };

  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int k = 0; k < K; ++k) {
      bool scheduled = false;
      for (int i = 0; i < n_f && !scheduled; ++i)
        for (int n = 0; n < N && !scheduled; ++n) scheduled = pol.assign(i, k, n) > 0.0;
      double need = 0.0;
      if (cfg.p_req_w[k] > 0.0) {
        if (pickup[k] <= 0.0) continue;
        need = cfg.p_req_w[k] / pickup[k];
      }
      double sum_rate = 0.0, cap = 0.0, relief = 0.0;
      for (int j = 0; j < K; ++j) {
        sum_rate += rate[j];
        cap += cfg.alpha[j] * rate[j];
        relief += pickup[j] * policy_rho_e(pol, j);
      }
      double cur_rho = policy_rho_e(pol, k);
      double cur_supply = s0 - relief;
      double best_eff = cur_supply > 0.0 ? cap / cur_supply : 0.0;
      int best_b = -1;
      double best_rate = rate[k];
      for (int b = 0; b < N; ++b) {
        double rho = pol.modes_e[b];
        if (rho < need * (1.0 - 1e-12)) continue;
        if (scheduled && best_compatible_mode(pol, rho) < 0) continue;
        double r_new = rate_with(k, rho);
        if (is_delay[k] && r_new < cfg.r_min_k_bps[k]) continue;
        double sum_new = sum_rate - rate[k] + r_new;
        if (sum_new < cfg.r_min_bps) continue;
        double cap_new = cap + cfg.alpha[k] * (r_new - rate[k]);
        double supply_new = s0 - relief - pickup[k] * (rho - cur_rho);
        if (supply_new <= 0.0) continue;
        double eff = cap_new / supply_new;
        if (eff > best_eff * (1.0 + 1e-12)) {
          best_eff = eff;
          best_b = b;
          best_rate = r_new;
        }
      }
      if (best_b < 0) continue;
      for (int b = 0; b < N; ++b) pol.e_select(k, b) = 0.0;
      pol.e_select(k, best_b) = 1.0;
      int m = best_compatible_mode(pol, pol.modes_e[best_b]);
      for (int i = 0; i < n_f; ++i) {
        int cur = -1;
        for (int n = 0; n < N; ++n)
          if (pol.assign(i, k, n) > 0.0) cur = n;
        if (cur < 0 || m == cur) continue;
        pol.assign(i, k, cur) = 0.0;
        pol.assign(i, k, m) = 1.0;
        pol.power(i, k, m) = pol.power(i, k, cur);  // the level travels with it
      }
      rate[k] = best_rate;
    }
  }
}

// Reassignment against the true objective, discrete counterpart. Moving a
// subcarrier keeps the row power, so supply draw and collected powers stay
// put; each target is tried at its current level and at the smallest level
// covering its harvesting floor, so a receiver parked at full harvesting can
// still win subcarriers.
void improve_schedule_d(const SystemConfig& cfg, const ChannelRealization& ch,
                        DiscretePolicy& pol) {
  const int n_f = pol.assign.d0, K = pol.assign.d1, N = pol.assign.d2;
  std::vector<char> is_delay(K, 0);
  for (int j : cfg.delay_set) is_delay[j] = 1;
  std::vector<double> pickup(K, 0.0);
  double tx = 0.0;
  for (int i = 0; i < n_f; ++i) {
    double row = 0.0;
    for (int j = 0; j < K; ++j)
      for (int n = 0; n < N; ++n) row += pol.power(i, j, n) * pol.assign(i, j, n);
    tx += row;
    for (int k = 0; k < K; ++k)
      pickup[k] += row * effective_gain(ch, i, k) + cfg.sigma_ant_w + ch.sigma_int_w(i, k);
  }
  for (int k = 0; k < K; ++k) pickup[k] *= cfg.eta[k];
  double s0 = cfg.p_ct_w + K * cfg.p_cr_w + cfg.eps_pa * tx;

  std::vector<double> rate(K, 0.0);
  for (int k = 0; k < K; ++k) rate[k] = receiver_rate_d(cfg, ch, pol, k);

  // receiver k's rate at level b with subcarrier extra (power p) added
  auto rate_at = [&](int k, int b, int extra, double p) {
    int m = best_compatible_mode(pol, pol.modes_e[b]);
    if (m < 0) return 0.0;
    double v = pol.modes_i[m];
    double r = 0.0;
    for (int i = 0; i < n_f; ++i) {
      double pw = 0.0;
      bool owned = false;
      for (int n = 0; n < N; ++n)
        if (pol.assign(i, k, n) > 0.0) {
          owned = true;
          pw = pol.power(i, k, n);
        }
      if (!owned) {
        if (i != extra) continue;
        pw = p;
      }
      r += subcarrier_rate_bps(cfg.subcarrier_bw_hz, pw, effective_gain(ch, i, k), v,
                               cfg.sigma_ant_w + ch.sigma_int_w(i, k), cfg.sigma_proc_w);
    }
    return r;
  };
  auto level_of = [&](int k) {
    for (int b = 0; b < N; ++b)
      if (pol.e_select(k, b) > 0.0) return b;
    return 0;
  };
  auto smallest_level_at_or_above = [&](double need) {
    int pick = -1;
    double pick_v = kInf;
    for (int b = 0; b < N; ++b) {
      double v = pol.modes_e[b];
      if (v >= need * (1.0 - 1e-12) && v < pick_v) {
        pick_v = v;
        pick = b;
      }
    }
    return pick;
  };

  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int i = 0; i < n_f; ++i) {
      int j = -1, j_n = -1;
      for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n)
          if (pol.assign(i, k, n) > 0.0) {
            j = k;
            j_n = n;
          }
      if (j < 0 || pol.power(i, j, j_n) <= 0.0) continue;
      double p = pol.power(i, j, j_n);

      double sum_rate = 0.0, cap = 0.0, relief = 0.0;
      for (int m = 0; m < K; ++m) {
        sum_rate += rate[m];
        cap += cfg.alpha[m] * rate[m];
        relief += pickup[m] * policy_rho_e(pol, m);
      }
      double cur_supply = s0 - relief;
      double cur_eff = cur_supply > 0.0 ? cap / cur_supply : 0.0;

      double lost = subcarrier_rate_bps(cfg.subcarrier_bw_hz, p, effective_gain(ch, i, j),
                                        pol.modes_i[j_n], cfg.sigma_ant_w + ch.sigma_int_w(i, j),
                                        cfg.sigma_proc_w);
      double r_j_new = std::max(rate[j] - lost, 0.0);
      if (is_delay[j] && r_j_new < cfg.r_min_k_bps[j]) continue;

      int best_k = -1, best_b = -1;
      double best_eff = cur_eff, best_rate_k = 0.0;
      for (int k = 0; k < K; ++k) {
        if (k == j) continue;
        double need = 0.0;
        if (cfg.p_req_w[k] > 0.0) {
          if (pickup[k] <= 0.0) continue;
          need = cfg.p_req_w[k] / pickup[k];
        }
        int floor_b = smallest_level_at_or_above(need);
        int levels[2] = {level_of(k), floor_b};
        for (int b : levels) {
          if (b < 0) continue;
          if (pol.modes_e[b] < need * (1.0 - 1e-12)) continue;
          if (best_compatible_mode(pol, pol.modes_e[b]) < 0) continue;
          double r_k_new = rate_at(k, b, i, p);
          if (is_delay[k] && r_k_new < cfg.r_min_k_bps[k]) continue;
          double sum_new = sum_rate - rate[j] - rate[k] + r_j_new + r_k_new;
          if (sum_new < cfg.r_min_bps) continue;
          double cap_new = cap + cfg.alpha[j] * (r_j_new - rate[j]) +
                           cfg.alpha[k] * (r_k_new - rate[k]);
          double supply_new =
              s0 - relief - pickup[k] * (pol.modes_e[b] - policy_rho_e(pol, k));
          if (supply_new <= 0.0) continue;
          double eff = cap_new / supply_new;
          if (eff > best_eff * (1.0 + 1e-12)) {
            best_eff = eff;
            best_k = k;
            best_b = b;
            best_rate_k = r_k_new;
          }
        }
      }
      if (best_k < 0) continue;
      pol.assign(i, j, j_n) = 0.0;
      pol.power(i, j, j_n) = 0.0;
      for (int b = 0; b < N; ++b) pol.e_select(best_k, b) = 0.0;
      pol.e_select(best_k, best_b) = 1.0;
      int m = best_compatible_mode(pol, pol.modes_e[best_b]);
      pol.assign(i, best_k, m) = 1.0;
      pol.power(i, best_k, m) = p;
      // re-seat the target's other subcarriers on the new level
      for (int i2 = 0; i2 < n_f; ++i2) {
        if (i2 == i) continue;
        int cur = -1;
        for (int n = 0; n < N; ++n)
          if (pol.assign(i2, best_k, n) > 0.0) cur = n;
        if (cur < 0 || cur == m) continue;
        pol.assign(i2, best_k, cur) = 0.0;
        pol.assign(i2, best_k, m) = 1.0;
        pol.power(i2, best_k, m) = pol.power(i2, best_k, cur);
      }
      rate[j] = r_j_new;
      rate[best_k] = best_rate_k;
    }
  }
}

}  // namespace

DiscretePolicy extract_primal_discrete(const SystemConfig& cfg, const ChannelRealization& ch,
                                       const DiscreteInnerResult& inner) {
  DiscretePolicy pol = inner.policy;
  snap_info_modes(pol);
  enforce_power_caps_d(cfg, pol);
  for (int pass = 0; pass < 2; ++pass) {
    repair_harvest_d(cfg, ch, pol);
    for (int k : cfg.delay_set) repair_receiver_rate_d(cfg, ch, pol, k, cfg.r_min_k_bps[k]);
    repair_system_rate_d(cfg, ch, pol);
  }
  repair_harvest_d(cfg, ch, pol);
  polish_splits_d(cfg, ch, pol);
  improve_schedule_d(cfg, ch, pol);
  polish_splits_d(cfg, ch, pol);
  // repairs write scratch power into unassigned slots; none of it is radiated
  for (int i = 0; i < pol.power.d0; ++i)
    for (int k = 0; k < pol.power.d1; ++k)
      for (int n = 0; n < pol.power.d2; ++n)
        if (pol.assign(i, k, n) <= 0.0) pol.power(i, k, n) = 0.0;
  return pol;
}

namespace {

std::string mode_e_string(const DiscretePolicy& pol) {
  std::ostringstream out;
  for (int k = 0; k < pol.e_select.rows; ++k) {
    if (k) out << ';';
    out << policy_rho_e(pol, k);
  }
  return out.str();
}

}  // namespace

DiscreteSolveReport solve_discrete(const SystemConfig& cfg, const ChannelRealization& ch) {
  DiscreteSolveReport rep;
  rep.q_trajectory.push_back(0.0);
  rep.q_original_trajectory.push_back(0.0);

  DiscreteMultiplierState warm;
  DiscretePolicy best_policy;
  double q = 0.0;
  bool have_policy = false;

  for (int j = 0; j < cfg.dinkelbach.max_iterations; ++j) {
    DiscreteInnerResult inner = inner_solve_discrete(cfg, ch, q, warm);
    warm = inner.multipliers;
    DiscretePolicy pol = extract_primal_discrete(cfg, ch, inner);
    ContinuousPolicy flat = collapse(pol);
    SurrogatePair sp = surrogate_pair(cfg, ch, flat);
    Metrics met = evaluate(cfg, ch, flat);

    rep.inner_iterations.push_back(inner.iterations);
    rep.dual_residual.push_back(inner.final_step);
    rep.mode_e_trajectory.push_back(mode_e_string(pol));
    ++rep.outer_iterations;

    double q_orig = met.supply_power_w > 0.0 ? met.capacity_bps / met.supply_power_w : 0.0;
    if (sp.u_tp_hat <= 0.0) {
      if (!have_policy) {
        best_policy = pol;
        have_policy = true;
        rep.q_trajectory.push_back(0.0);
        rep.q_original_trajectory.push_back(q_orig);
      }
      rep.status = "degenerate_denominator";
      break;
    }
    double q_next = sp.u_hat / sp.u_tp_hat;
    if (q_next <= q) {
      if (!have_policy) {
        best_policy = pol;
        have_policy = true;
        rep.q_trajectory.push_back(std::max(q_next, 0.0));
        rep.q_original_trajectory.push_back(q_orig);
      }
      rep.status = "converged";
      break;
    }
    best_policy = pol;
    have_policy = true;
    rep.q_trajectory.push_back(q_next);
    rep.q_original_trajectory.push_back(q_orig);
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
    rep.metrics = evaluate(cfg, ch, collapse(rep.policy));
    auto viols = check_feasible(cfg, ch, rep.policy);
    rep.feasible = viols.empty();
    rep.q_original_bpj = rep.metrics.efficiency_bpj;
    if (!rep.feasible) {
      rep.metrics.capacity_bps = 0.0;
      rep.metrics.efficiency_bpj = 0.0;
      rep.q_original_bpj = 0.0;
      rep.status = "infeasible";
    }
  } else {
    rep.policy = DiscretePolicy(ch.n_subcarriers, ch.n_receivers, cfg.n_modes());
    rep.policy.modes_e = cfg.modes_e;
    rep.policy.modes_i = cfg.modes_i;
    // nothing scheduled, but every receiver still picks a level (the lowest)
    for (int k = 0; k < ch.n_receivers; ++k) rep.policy.e_select(k, 0) = 1.0;
    rep.metrics = evaluate(cfg, ch, collapse(rep.policy));
    rep.metrics.capacity_bps = 0.0;
    rep.metrics.efficiency_bpj = 0.0;
    rep.feasible = false;
    rep.status = "infeasible";
  }
  return rep;
}

namespace {

bool dnearly(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-9 * (std::abs(scale) + 1.0);
}

}  // namespace

std::vector<std::string> check_report(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const DiscreteSolveReport& rep) {
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
      (int)rep.dual_residual.size() != rep.outer_iterations ||
      (int)rep.mode_e_trajectory.size() != rep.outer_iterations)
    flag("per-pass diagnostics out of sync with outer_iterations");
  if (!rep.q_trajectory.empty() && !dnearly(rep.q_bpj, rep.q_trajectory.back(), rep.q_bpj))
    flag("reported ratio is not the last trajectory entry");

  const int n_f = ch.n_subcarriers, n_k = ch.n_receivers, n_n = cfg.n_modes();
  const DiscretePolicy& pol = rep.policy;
  if (pol.assign.d0 != n_f || pol.assign.d1 != n_k || pol.assign.d2 != n_n ||
      pol.e_select.rows != n_k || pol.e_select.cols != n_n) {
    flag("policy grids have the wrong shape");
  } else {
    for (int i = 0; i < n_f; ++i) {
      double row = 0.0;
      for (int k = 0; k < n_k; ++k)
        for (int n = 0; n < n_n; ++n) {
          double v = pol.assign(i, k, n);
          if (v != 0.0 && v != 1.0) flag("assignment entry not Boolean");
          row += v;
          if (v == 0.0 && pol.power(i, k, n) != 0.0) flag("power on an unassigned mode");
        }
      if (row > 1.0) flag("subcarrier " + std::to_string(i) + " assigned more than once");
    }
    for (int k = 0; k < n_k; ++k) {
      double row = 0.0;
      for (int n = 0; n < n_n; ++n) {
        double v = pol.e_select(k, n);
        if (v != 0.0 && v != 1.0) flag("energy selector entry not Boolean");
        row += v;
      }
      if (row != 1.0) flag("receiver " + std::to_string(k) + " energy row does not sum to 1");
    }
  }

  bool clean = check_feasible(cfg, ch, rep.policy).empty();
  if (rep.feasible != clean) flag("feasible flag disagrees with the constraint check");
  if (rep.feasible && rep.status == "infeasible") flag("feasible run labeled infeasible");

  Metrics fresh = evaluate(cfg, ch, collapse(rep.policy));
  if (!dnearly(rep.metrics.transmit_power_w, fresh.transmit_power_w, fresh.transmit_power_w))
    flag("transmit power does not match the policy");
  if (!dnearly(rep.metrics.harvested_w_total, fresh.harvested_w_total, fresh.harvested_w_total))
    flag("harvested power does not match the policy");
  if (rep.feasible) {
    if (!dnearly(rep.metrics.capacity_bps, fresh.capacity_bps, fresh.capacity_bps))
      flag("capacity does not match the policy");
    if (!dnearly(rep.q_original_bpj, rep.metrics.efficiency_bpj, rep.q_original_bpj))
      flag("true efficiency out of sync with metrics");
  } else {
    if (rep.metrics.capacity_bps != 0.0 || rep.metrics.efficiency_bpj != 0.0 ||
        rep.q_original_bpj != 0.0)
      flag("infeasible run must report zeroed capacity and efficiency");
  }
  return bad;
}

}  // namespace swipt
