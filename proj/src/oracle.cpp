#include "swipt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "swipt/solver_continuous.hpp"

namespace swipt {

namespace {
constexpr double kLn2 = 0.6931471805599453;

// One more choice vector in mixed-radix counting.
bool next_choice(std::vector<int>& digits, int base) {
  for (size_t d = 0; d < digits.size(); ++d) {
    if (++digits[d] < base) return true;
    digits[d] = 0;
  }
  return false;
}
}  // namespace

BruteForceResult brute_force_discrete(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const std::vector<double>& power_grid_w,
                                      const std::vector<double>& extra_powers_w) {
  const int n_f = ch.n_subcarriers, K = ch.n_receivers;
  const int N = cfg.n_modes();

  std::vector<double> powers = power_grid_w;
  powers.insert(powers.end(), extra_powers_w.begin(), extra_powers_w.end());
  std::sort(powers.begin(), powers.end());
  powers.erase(std::unique(powers.begin(), powers.end()), powers.end());
  powers.erase(std::remove_if(powers.begin(), powers.end(),
                              [](double p) { return !(p > 0.0); }),
               powers.end());
  if (powers.empty()) throw std::invalid_argument("power grid is empty");
  if (powers.size() > 12) throw std::invalid_argument("power grid too large to enumerate");

  // per-subcarrier choice: 0 = idle, otherwise 1 + (k * N + n); the power
  // grid multiplies in once per active subcarrier (bounded by all-active)
  const int slot_base = K * N + 1;
  double ln_states = n_f * std::log((double)slot_base) + K * std::log((double)N) +
                     n_f * std::log((double)powers.size());
  if (ln_states > std::log(8e6))
    throw std::invalid_argument("instance too large to enumerate");

  BruteForceResult best;
  best.policy = DiscretePolicy(n_f, K, N);
  best.policy.modes_e = cfg.modes_e;
  best.policy.modes_i = cfg.modes_i;

  std::vector<int> e_choice(K, 0);
  do {
    std::vector<int> slot(n_f, 0);
    do {
      std::vector<int> active;
      for (int i = 0; i < n_f; ++i)
        if (slot[i] > 0) active.push_back(i);

      std::vector<int> p_choice(active.size(), 0);
      bool more_powers = true;
      while (more_powers) {
        DiscretePolicy pol(n_f, K, N);
        pol.modes_e = cfg.modes_e;
        pol.modes_i = cfg.modes_i;
        for (int k = 0; k < K; ++k) pol.e_select(k, e_choice[k]) = 1.0;
        for (size_t a = 0; a < active.size(); ++a) {
          int i = active[a];
          int pair = slot[i] - 1;
          int k = pair / N, n = pair % N;
          pol.assign(i, k, n) = 1.0;
          pol.power(i, k, n) = powers[p_choice[a]];
        }
        ++best.evaluated;
        if (check_feasible(cfg, ch, pol).empty()) {
          Metrics met = evaluate(cfg, ch, collapse(pol));
          if (!best.feasible || met.efficiency_bpj > best.efficiency_bpj) {
            best.feasible = true;
            best.efficiency_bpj = met.efficiency_bpj;
            best.metrics = met;
            best.policy = pol;
          }
        }
        more_powers = !p_choice.empty() && next_choice(p_choice, (int)powers.size());
      }
    } while (next_choice(slot, slot_base));
  } while (next_choice(e_choice, N));

  return best;
}

BisectionResult bisection_ratio_max(const std::function<double(double)>& inner_value,
                                    double q_lo, double q_hi, double tol) {
  if (!(q_hi > q_lo)) throw std::invalid_argument("empty bisection bracket");
  double f_lo = inner_value(q_lo);
  double f_hi = inner_value(q_hi);
  if (f_lo < 0.0 || f_hi > 0.0)
    throw std::invalid_argument("bracket endpoints do not straddle the root");
  BisectionResult res;
  double lo = q_lo, hi = q_hi;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval below one ulp
    ++res.iterations;
    double fm = inner_value(mid);
    if (fm > 0.0)
      lo = mid;
    else
      hi = mid;
    if (res.iterations > 200) break;
  }
  res.q = 0.5 * (lo + hi);
  res.residual = inner_value(res.q);
  return res;
}

bool unimodality_check(const SystemConfig& cfg, const ChannelRealization& ch,
                       const ContinuousPolicy& pol, int i, int k, int samples) {
  if (samples < 3) return false;
  ContinuousPolicy probe = pol;
  for (int j = 0; j < ch.n_receivers; ++j) probe.assign(i, j) = 0.0;
  probe.assign(i, k) = 1.0;
  if (probe.rho_i(i, k) <= 0.0) probe.rho_i(i, k) = cfg.rho_i_max;

  double lo = 1e-6, hi = 10.0 * cfg.p_max_w;
  std::vector<double> values(samples);
  for (int t = 0; t < samples; ++t) {
    double frac = samples == 1 ? 0.0 : (double)t / (samples - 1);
    probe.power(i, k) = lo * std::pow(hi / lo, frac);
    Metrics met = evaluate(cfg, ch, probe);
    if (!(met.supply_power_w > 0.0)) return false;  // precondition broken
    values[t] = met.capacity_bps / met.supply_power_w;
  }

  // signs of consecutive differences, small ones squashed to zero
  bool seen_down = false;
  for (int t = 0; t + 1 < samples; ++t) {
    double d = values[t + 1] - values[t];
    double scale = std::max(std::abs(values[t]), std::abs(values[t + 1]));
    if (std::abs(d) <= 1e-12 * scale) continue;
    if (d < 0.0)
      seen_down = true;
    else if (seen_down)
      return false;  // rose again after falling
  }
  return true;
}

namespace {

// Time-shared decision variables: scheduled power and info split are the
// products s*P and s*rho_i; rho_e stays per receiver.
struct RelaxedPoint {
  Grid s, p_tilde, ri_tilde;  // n_F x K
  std::vector<double> rho_e;  // K

  RelaxedPoint(int n_f, int k) : s(n_f, k), p_tilde(n_f, k), ri_tilde(n_f, k), rho_e(k, 0.0) {}
};

double relaxed_objective(const SystemConfig& cfg, const ChannelRealization& ch,
                         const RelaxedPoint& x, double q) {
  const int n_f = ch.n_subcarriers, K = ch.n_receivers;
  double rate_part = 0.0, transmit = 0.0;
  std::vector<double> row_power(n_f, 0.0);
  for (int i = 0; i < n_f; ++i)
    for (int k = 0; k < K; ++k) {
      transmit += x.p_tilde(i, k);
      row_power[i] += x.p_tilde(i, k);
    }
  for (int i = 0; i < n_f; ++i)
    for (int k = 0; k < K; ++k) {
      double s = x.s(i, k);
      if (s <= 0.0) continue;
      double p = x.p_tilde(i, k) / s;
      double ri = x.ri_tilde(i, k) / s;
      double sigma_bar = cfg.sigma_ant_w + ch.sigma_int_w(i, k);
      double r = approx_rate_bps(cfg.subcarrier_bw_hz, p, effective_gain(ch, i, k), ri,
                                 sigma_bar, cfg.sigma_proc_w);
      if (r > -std::numeric_limits<double>::infinity())
        rate_part += cfg.alpha[k] * s * r;
    }
  double harvest = 0.0;
  for (int k = 0; k < K; ++k) {
    double pickup = 0.0, noise = 0.0;
    for (int i = 0; i < n_f; ++i) {
      pickup += row_power[i] * effective_gain(ch, i, k);
      noise += (cfg.sigma_ant_w + ch.sigma_int_w(i, k)) * x.rho_e[k];
    }
    harvest += cfg.eta[k] * (pickup + noise);
  }
  double supply = cfg.p_ct_w + K * cfg.p_cr_w + cfg.eps_pa * transmit - harvest;
  return rate_part - q * supply;
}

RelaxedPoint random_relaxed(const SystemConfig& cfg, const ChannelRealization& ch, Rng& rng) {
  const int n_f = ch.n_subcarriers, K = ch.n_receivers;
  RelaxedPoint x(n_f, K);
  for (int k = 0; k < K; ++k) x.rho_e[k] = 0.05 + 0.25 * rng.uniform();
  for (int i = 0; i < n_f; ++i) {
    std::vector<double> weight(K);
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      weight[k] = 0.1 + rng.uniform();
      total += weight[k];
    }
    double budget = 0.3 + 0.6 * rng.uniform();  // row occupancy strictly inside (0,1)
    for (int k = 0; k < K; ++k) {
      double s = budget * weight[k] / total;
      x.s(i, k) = s;
      x.p_tilde(i, k) = s * cfg.p_max_w * (0.1 + 0.8 * rng.uniform()) / n_f;
      x.ri_tilde(i, k) = s * (1.0 - x.rho_e[k]) * (0.1 + 0.8 * rng.uniform());
    }
  }
  return x;
}

RelaxedPoint midpoint(const RelaxedPoint& a, const RelaxedPoint& b) {
  RelaxedPoint m(a.s.rows, a.s.cols);
  for (size_t t = 0; t < a.s.v.size(); ++t) {
    m.s.v[t] = 0.5 * (a.s.v[t] + b.s.v[t]);
    m.p_tilde.v[t] = 0.5 * (a.p_tilde.v[t] + b.p_tilde.v[t]);
    m.ri_tilde.v[t] = 0.5 * (a.ri_tilde.v[t] + b.ri_tilde.v[t]);
  }
  for (size_t k = 0; k < a.rho_e.size(); ++k) m.rho_e[k] = 0.5 * (a.rho_e[k] + b.rho_e[k]);
  return m;
}

}  // namespace

bool concavity_check(const SystemConfig& cfg, const ChannelRealization& ch,
                     const ContinuousPolicy& point, double q, int trials) {
  Rng rng(derive_seed(ch.seed, 9001));
  for (int t = 0; t < trials; ++t) {
    RelaxedPoint a = random_relaxed(cfg, ch, rng);
    RelaxedPoint b = random_relaxed(cfg, ch, rng);
    double fa = relaxed_objective(cfg, ch, a, q);
    double fb = relaxed_objective(cfg, ch, b, q);
    double fm = relaxed_objective(cfg, ch, midpoint(a, b), q);
    double scale = std::max({1.0, std::abs(fa), std::abs(fb), std::abs(fm)});
    if (fm < 0.5 * (fa + fb) - 1e-9 * scale) return false;
  }

  // diagonal curvature signs at the supplied interior point
  int pi = -1, pk = -1;
  for (int i = 0; i < ch.n_subcarriers && pi < 0; ++i)
    for (int k = 0; k < ch.n_receivers; ++k)
      if (point.assign(i, k) > 0.0 && point.power(i, k) > 0.0 && point.rho_i(i, k) > 0.0) {
        pi = i;
        pk = k;
        break;
      }
  if (pi < 0) return false;
  double g = effective_gain(ch, pi, pk);
  double sigma_bar = cfg.sigma_ant_w + ch.sigma_int_w(pi, pk);
  double p0 = point.power(pi, pk), r0 = point.rho_i(pi, pk);

  auto rate_of_p = [&](long double p) -> long double {
    long double ratio = (long double)r0 * p * g / ((long double)r0 * sigma_bar +
                                                   (long double)cfg.sigma_proc_w);
    return std::log(ratio) / (long double)kLn2;
  };
  auto rate_of_r = [&](long double r) -> long double {
    long double ratio = r * (long double)p0 * g / (r * (long double)sigma_bar +
                                                   (long double)cfg.sigma_proc_w);
    return std::log(ratio) / (long double)kLn2;
  };
  long double hp = std::max(1e-6L, 1e-6L * (long double)p0);
  long double hr = std::max(1e-6L, 1e-6L * (long double)r0);
  long double tau1 = second_difference(rate_of_p, p0, hp);
  long double tau2 = second_difference(rate_of_r, r0, hr);
  if (!(tau1 <= 1e-8L) || !(tau2 <= 1e-8L)) return false;

  // harvesting split enters the surrogate linearly: flat second difference
  auto supply_of_re = [&](long double re) -> long double {
    long double noise = 0.0L;
    for (int i = 0; i < ch.n_subcarriers; ++i)
      noise += (long double)(cfg.sigma_ant_w + ch.sigma_int_w(i, pk));
    return -(long double)q * (-(long double)cfg.eta[pk] * re * noise);
  };
  long double tau3 = second_difference(supply_of_re, 0.5L, 1e-4L);
  double tau3_scale = std::max(1.0, q * cfg.eta[pk]);
  if (std::abs((double)tau3) > 1e-8 * tau3_scale) return false;
  return true;
}

long double second_difference(const std::function<long double(long double)>& f,
                              long double x, long double h) {
  return (f(x - h) - 2.0L * f(x) + f(x + h)) / (h * h);
}

double rate_curvature_power(double p_w) { return -1.0 / (p_w * p_w * kLn2); }

double rate_curvature_split(const SystemConfig& cfg, double rho_i) {
  double s = cfg.sigma_ant_w + cfg.sigma_int_w;
  double n = cfg.sigma_proc_w;
  double denom = rho_i * s + n;
  return -n * (n + 2.0 * rho_i * s) / (rho_i * rho_i * kLn2 * denom * denom);
}

}  // namespace swipt
