// Acceptance gate. Each numbered check exercises one end-to-end claim the
// engine is sold on and prints exactly one PASS/FAIL line; the process exits
// nonzero when any line fails. Tolerances are pinned here, next to the check
// they guard. Every solve report produced along the way is also fed through
// the structural audit, which check 9 settles at the end.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "swipt/baselines.hpp"
#include "swipt/oracle.hpp"
#include "swipt/sim.hpp"

using namespace swipt;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void verdict(int n, bool ok, const char* fmt, ...) {
  if (!ok) ++g_failures;
  char buf[640];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  std::printf("criterion %d: %s - %s\n", n, ok ? "PASS" : "FAIL", buf);
  std::fflush(stdout);
}

// running structural audit over every report this binary produces
int g_audited = 0;
std::vector<std::string> g_audit;

template <typename Report>
void audit(const SystemConfig& cfg, const ChannelRealization& ch, const Report& rep) {
  ++g_audited;
  for (const std::string& msg : check_report(cfg, ch, rep)) g_audit.push_back(msg);
}

// per-draw efficiencies with the failure convention applied: infeasible
// draws count as zero, same as the point means
std::vector<double> draw_efficiency(const PointSummary& p) {
  std::vector<double> v;
  v.reserve(p.draws.size());
  for (const DrawResult& d : p.draws)
    v.push_back(d.feasible ? d.metrics.efficiency_bpj : 0.0);
  return v;
}

struct PairedStep {
  double mean_diff = 0.0;
  double guard = 0.0;  // two standard errors of the per-draw difference
};

// draws at adjacent sweep points share seeds, so the difference is paired
PairedStep paired_step(const std::vector<double>& lo, const std::vector<double>& hi) {
  PairedStep st;
  size_t n = std::min(lo.size(), hi.size());
  if (n < 2) return st;
  for (size_t j = 0; j < n; ++j) st.mean_diff += hi[j] - lo[j];
  st.mean_diff /= static_cast<double>(n);
  double ss = 0.0;
  for (size_t j = 0; j < n; ++j) {
    double d = hi[j] - lo[j] - st.mean_diff;
    ss += d * d;
  }
  st.guard = 2.0 * std::sqrt(ss / (static_cast<double>(n) - 1.0) / static_cast<double>(n));
  return st;
}

// 1: the ratio ascent converges fast and lands on its fixed point.
// 100 random reference-scale draws; at least 95 must show a nondecreasing
// ratio trajectory, a positive converged ratio, at most 10 outer passes and a
// terminal gap |u - q u_tp| below 1e-6 (|u| + 1); every solve must stay under
// one second of wall time.
void check1() {
  auto t0 = Clock::now();
  SystemConfig cfg = desk_config(3, 16);
  const int n = 100;
  int pass = 0, slow = 0;
  double worst_gap = 0.0, worst_rt = 0.0;
  for (int j = 0; j < n; ++j) {
    ChannelRealization ch = generate_realization(cfg, derive_seed(101, (uint64_t)j));
    auto s0 = Clock::now();
    SolveReport rep = solve_continuous(cfg, ch);
    double rt = elapsed_s(s0);
    audit(cfg, ch, rep);
    worst_rt = std::max(worst_rt, rt);
    if (rt >= 1.0) ++slow;
    SurrogatePair sp = surrogate_pair(cfg, ch, rep.policy);
    double gap = std::fabs(sp.u_hat - rep.q_bpj * sp.u_tp_hat);
    double bound = 1e-6 * (std::fabs(sp.u_hat) + 1.0);
    worst_gap = std::max(worst_gap, gap / bound);
    bool mono = std::is_sorted(rep.q_trajectory.begin(), rep.q_trajectory.end());
    if (mono && rep.q_bpj > 0.0 && rep.outer_iterations <= 10 && gap < bound) ++pass;
  }
  bool ok = pass >= 95 && slow == 0;
  verdict(1, ok,
          "%d/%d draws: monotone ratio ascent to a fixed point in <=10 passes "
          "(worst terminal gap %.2g of its bound, worst runtime %.3f s, %.0f s total)",
          pass, n, worst_gap, worst_rt, elapsed_s(t0));
}

// 2: most runs are near-converged after five outer passes. 20 draws at each
// of three interference levels; the traced ratio at pass 5 (or at exit, when
// earlier) must reach 90% of the converged value on at least 80% overall.
void check2() {
  const double levels_dbm[3] = {-70.0, -55.0, -40.0};
  const int per_level = 20;
  int pass = 0, total = 0, by_level[3] = {0, 0, 0};
  for (int L = 0; L < 3; ++L) {
    SystemConfig cfg = desk_config(3, 16);
    cfg.sigma_int_w = dbm_to_watt(levels_dbm[L]);
    for (int j = 0; j < per_level; ++j) {
      uint64_t seed = derive_seed(202, (uint64_t)(L * per_level + j));
      ChannelRealization ch = generate_realization(cfg, seed);
      SolveReport rep = solve_continuous(cfg, ch);
      audit(cfg, ch, rep);
      std::vector<TraceRow> tr = convergence_trace(rep);
      ++total;
      if (tr.empty()) continue;
      size_t at = std::min<size_t>(5, tr.size() - 1);
      if (tr[at].bound_ratio >= 0.90) {
        ++pass;
        ++by_level[L];
      }
    }
  }
  bool ok = pass * 5 >= total * 4;
  verdict(2, ok,
          "%d/%d runs at 90%% of the converged ratio by pass 5 "
          "(-70/-55/-40 dBm interference: %d/%d/%d of %d each)",
          pass, total, by_level[0], by_level[1], by_level[2], per_level);
}

// 3: on instances small enough to enumerate, the mode-indexed solver reaches
// at least 95% of the exhaustive optimum, its own powers injected into the
// enumeration grid so the comparison can only flatter the oracle. Every one
// of the 50 instances must clear the bar (agreement on infeasibility counts),
// and the whole block must finish inside two minutes.
void check3() {
  auto t0 = Clock::now();
  struct Shape {
    int k, nf, count;
  };
  const Shape shapes[] = {{2, 2, 20}, {2, 3, 15}, {1, 4, 10}, {1, 3, 5}};
  int idx = 0, pass = 0, total = 0, disagree = 0;
  double worst = 1.0;
  for (const Shape& s : shapes) {
    SystemConfig cfg = desk_config(s.k, s.nf);
    cfg.modes_e = {0.5, 0.0};
    cfg.modes_i = {0.5, 1.0};
    const std::vector<double> grid = {cfg.p_max_w / 64.0, cfg.p_max_w / 8.0, cfg.p_max_w};
    for (int j = 0; j < s.count; ++j, ++idx) {
      ChannelRealization ch = generate_realization(cfg, derive_seed(303, (uint64_t)idx));
      DiscreteSolveReport rep = solve_discrete(cfg, ch);
      audit(cfg, ch, rep);
      std::vector<double> injected;
      for (int i = 0; i < rep.policy.assign.d0; ++i)
        for (int k = 0; k < rep.policy.assign.d1; ++k)
          for (int m = 0; m < rep.policy.assign.d2; ++m)
            if (rep.policy.assign(i, k, m) > 0.5) injected.push_back(rep.policy.power(i, k, m));
      BruteForceResult bf = brute_force_discrete(cfg, ch, grid, injected);
      ++total;
      bool inst_ok;
      if (bf.feasible) {
        double ratio = bf.efficiency_bpj > 0.0 ? rep.q_original_bpj / bf.efficiency_bpj : 1.0;
        if (rep.feasible) worst = std::min(worst, ratio);
        if (!rep.feasible) ++disagree;
        inst_ok = rep.feasible && ratio >= 0.95 - 1e-12;
      } else {
        if (rep.feasible) ++disagree;
        inst_ok = !rep.feasible;
      }
      if (inst_ok) ++pass;
    }
  }
  double dt = elapsed_s(t0);
  bool ok = pass == total && dt < 120.0;
  verdict(3, ok,
          "%d/%d enumerable instances at >=95%% of the exhaustive optimum "
          "(worst ratio %.4f, %d feasibility disagreements, %.1f s)",
          pass, total, worst, disagree, dt);
}

// 4: averaged efficiency is nondecreasing in the power cap. The standard
// 10..30 dBm sweep, 500 shared draws per point; no step may fall by more than
// two paired standard errors, and the last two points must agree within 2%
// (the curve saturates once the cap stops binding).
void check4() {
  auto t0 = Clock::now();
  Preset pre = *lookup_preset("fig3");
  SweepSpec spec = pre.sweep;
  spec.algorithms = {Algorithm::ProposedContinuous};
  spec.jobs = 1;
  SweepResult sw = run_sweep(pre.config, spec, 404);
  const int n_pts = (int)spec.values.size();
  int bad_steps = 0;
  double worst_step = 0.0;  // most negative step, in units of its guard
  for (int v = 0; v + 1 < n_pts; ++v) {
    PairedStep st = paired_step(draw_efficiency(sw.points[v][0]),
                                draw_efficiency(sw.points[v + 1][0]));
    if (st.mean_diff < -st.guard) ++bad_steps;
    if (st.guard > 0.0) worst_step = std::min(worst_step, st.mean_diff / st.guard);
  }
  double m_prev = sw.points[n_pts - 2][0].efficiency_bpj;
  double m_last = sw.points[n_pts - 1][0].efficiency_bpj;
  double tail = std::fabs(m_last - m_prev) / std::max(m_last, m_prev);
  bool ok = bad_steps == 0 && m_last > 0.0 && tail < 0.02;
  verdict(4, ok,
          "efficiency vs power cap, %d points x %d draws: %d steps fell beyond two "
          "paired standard errors (worst %.2f guards), tail gap %.2f%% (<2%%), %.0f s",
          n_pts, spec.n_draws, bad_steps, worst_step, 100.0 * tail, elapsed_s(t0));
}

// 5: at a generous 30 dBm cap the efficiency ordering is continuous splitting,
// then discrete splitting, then the no-harvesting reference, while the
// capacity-maximizing reference buys the top capacity of the four. Averages
// over 500 shared draws; ties allowed to float by 1e-9 relative.
void check5() {
  auto t0 = Clock::now();
  Preset pre = *lookup_preset("fig3");
  SystemConfig cfg = apply_sweep_value(pre.config, "p_max_dbm", 30.0);
  const int n_draws = 500;
  PointSummary cont = run_point(cfg, Algorithm::ProposedContinuous, n_draws, 505, 1);
  PointSummary disc = run_point(cfg, Algorithm::ProposedDiscrete, n_draws, 505, 1);
  PointSummary ref_cap = run_point(cfg, Algorithm::Baseline1, n_draws, 505, 1);
  PointSummary ref_nh = run_point(cfg, Algorithm::Baseline2, n_draws, 505, 1);
  auto geq = [](double a, double b) { return a >= b - 1e-9 * (std::fabs(b) + 1.0); };
  bool eff_order = geq(cont.efficiency_bpj, disc.efficiency_bpj) &&
                   geq(disc.efficiency_bpj, ref_nh.efficiency_bpj);
  bool cap_lead = geq(ref_cap.capacity_bps, cont.capacity_bps) &&
                  geq(ref_cap.capacity_bps, disc.capacity_bps) &&
                  geq(ref_cap.capacity_bps, ref_nh.capacity_bps);
  bool ok = eff_order && cap_lead;
  verdict(5, ok,
          "30 dBm, %d shared draws: efficiency %.4g >= %.4g >= %.4g bit/J "
          "(continuous/discrete/no-harvest); capacity lead %.4g vs %.4g/%.4g/%.4g bit/s "
          "(capacity-max first), %.0f s",
          n_draws, cont.efficiency_bpj, disc.efficiency_bpj, ref_nh.efficiency_bpj,
          ref_cap.capacity_bps, cont.capacity_bps, disc.capacity_bps, ref_nh.capacity_bps,
          elapsed_s(t0));
}

// 6: when the interference power sits 60 dB above the processing noise, the
// splitter should divert nearly everything to the harvester: the converged
// information split sits on its declared floor (within 1e-3) on every
// allocated subcarrier, and the average harvested power strictly exceeds the
// moderate-interference run on the same seeds. Rate floors are dropped so the
// regime stays feasible and the box is [0.05, 1] x [0, 0.95].
void check6() {
  SystemConfig base = desk_config(3, 16);
  base.r_min_bps = 0.0;
  base.r_min_k_bps.assign(base.n_receivers, 0.0);
  base.delay_set.clear();
  base.rho_i_min = 0.05;
  base.rho_e_max = 1.0 - base.rho_i_min;
  SystemConfig high = base;
  high.sigma_int_w = 1e6 * base.sigma_proc_w;  // 60 dB above the processing floor
  const SystemConfig& moderate = base;         // keeps the -55 dBm default

  const int n = 40;
  int feas_high = 0, feas_mod = 0, off_floor = 0;
  double harv_high = 0.0, harv_mod = 0.0;  // infeasible draws stay in as zeros
  double worst_dev = 0.0;
  for (int j = 0; j < n; ++j) {
    uint64_t seed = derive_seed(606, (uint64_t)j);
    ChannelRealization ch_h = generate_realization(high, seed);
    SolveReport rh = solve_continuous(high, ch_h);
    audit(high, ch_h, rh);
    ChannelRealization ch_m = generate_realization(moderate, seed);
    SolveReport rm = solve_continuous(moderate, ch_m);
    audit(moderate, ch_m, rm);
    if (rh.feasible) {
      ++feas_high;
      harv_high += rh.metrics.harvested_w_total;
      for (int i = 0; i < rh.policy.assign.rows; ++i)
        for (int k = 0; k < rh.policy.assign.cols; ++k)
          if (rh.policy.assign(i, k) > 0.5) {
            double dev = std::fabs(rh.policy.rho_i(i, k) - high.rho_i_min);
            worst_dev = std::max(worst_dev, dev);
            if (dev > 1e-3) ++off_floor;
          }
    }
    if (rm.feasible) {
      ++feas_mod;
      harv_mod += rm.metrics.harvested_w_total;
    }
  }
  harv_high /= n;
  harv_mod /= n;
  bool ok = feas_high > 0 && off_floor == 0 && harv_high > harv_mod;
  verdict(6, ok,
          "strong interference pins the information split to its floor: %d/%d feasible "
          "runs, worst |rho_i - 0.05| = %.2g (tol 1e-3), mean harvested %.3g W vs %.3g W "
          "at moderate interference (%d/%d feasible)",
          feas_high, n, worst_dev, harv_high, harv_mod, feas_mod, n);
}

// 7: more receivers always buy capacity, but with a 20 dBm circuit cost per
// receiver the efficiency rises and then falls. K = 1..6 at an 18 dBm cap,
// 500 draws per point, discrete splitting. Capacity means must be strictly
// increasing; the efficiency peak must be interior, strictly above both ends,
// with each leg monotone within two paired standard errors.
void check7() {
  auto t0 = Clock::now();
  Preset pre = *lookup_preset("fig7");
  SweepSpec spec = pre.sweep;
  spec.jobs = 1;
  SweepResult sw = run_sweep(pre.config, spec, 707);
  const int n_pts = (int)spec.values.size();
  std::vector<double> cap(n_pts), eff(n_pts);
  for (int v = 0; v < n_pts; ++v) {
    cap[v] = sw.points[v][0].capacity_bps;
    eff[v] = sw.points[v][0].efficiency_bpj;
  }
  bool cap_up = true;
  for (int v = 0; v + 1 < n_pts; ++v) cap_up = cap_up && cap[v + 1] > cap[v];
  int peak = (int)(std::max_element(eff.begin(), eff.end()) - eff.begin());
  bool shape = peak > 0 && peak + 1 < n_pts && eff[peak] > eff[0] && eff[peak] > eff[n_pts - 1];
  for (int v = 0; v + 1 < n_pts && shape; ++v) {
    PairedStep st = paired_step(draw_efficiency(sw.points[v][0]),
                                draw_efficiency(sw.points[v + 1][0]));
    shape = v < peak ? st.mean_diff >= -st.guard : st.mean_diff <= st.guard;
  }
  bool ok = cap_up && shape;
  verdict(7, ok,
          "receiver sweep, 18 dBm cap, 20 dBm circuit draw each: capacity %s over "
          "K=1..6, efficiency %.4g -> %.4g -> %.4g bit/J (K=1 / peak at K=%d / K=6), "
          "rise-then-fall %s, %.0f s",
          cap_up ? "strictly increasing" : "NOT increasing", eff[0], eff[peak],
          eff[n_pts - 1], peak + 1, shape ? "holds" : "violated", elapsed_s(t0));
}

// 8: the shape assumptions behind the ascent. 200 power rays through solved
// allocations must be unimodal in efficiency; 1000 midpoint probes of the
// time-shared surrogate must come back concave; and the finite-difference
// curvature of the rate surface in the power coordinate must match the closed
// form -1/(P^2 ln 2) at P = 0.5 W within 1e-4 relative.
void check8() {
  SystemConfig cfg = desk_config(2, 8);
  int rays = 0, rays_ok = 0;
  for (uint64_t s = 0; rays < 200 && s < 120; ++s) {
    ChannelRealization ch = generate_realization(cfg, derive_seed(808, s));
    SolveReport rep = solve_continuous(cfg, ch);
    audit(cfg, ch, rep);
    if (!rep.feasible) continue;
    for (int i = 0; i < cfg.n_subcarriers && rays < 200; ++i)
      for (int k = 0; k < cfg.n_receivers && rays < 200; ++k)
        if (rep.policy.assign(i, k) > 0.5) {
          ++rays;
          if (unimodality_check(cfg, ch, rep.policy, i, k, 64)) ++rays_ok;
        }
  }

  SystemConfig c16 = desk_config(3, 16);
  bool midpoints = false;
  for (uint64_t s = 1000; s < 1010; ++s) {
    ChannelRealization ch = generate_realization(c16, derive_seed(808, s));
    SolveReport rep = solve_continuous(c16, ch);
    audit(c16, ch, rep);
    if (!rep.feasible) continue;
    midpoints = concavity_check(c16, ch, rep.policy, rep.q_bpj, 1000);
    break;
  }

  const double p_tilde = 0.5;
  const long double g = 1e-3L, rho = 0.8L;
  const long double sbar = (long double)(c16.sigma_ant_w + c16.sigma_int_w);
  const long double nproc = (long double)c16.sigma_proc_w;
  auto f = [=](long double p) {
    return std::log(p * g * rho / (rho * sbar + nproc)) / std::log(2.0L);
  };
  long double fd = second_difference(f, (long double)p_tilde, 1e-5L);
  double exact = rate_curvature_power(p_tilde);
  double rel = std::fabs((double)fd - exact) / std::fabs(exact);
  bool curv = rel <= 1e-4;

  bool ok = rays == 200 && rays_ok == 200 && midpoints && curv;
  verdict(8, ok,
          "%d/%d power rays unimodal, midpoint concavity %s (1000 probes), "
          "finite-difference power curvature off by %.2g relative (tol 1e-4)",
          rays_ok, rays, midpoints ? "clean" : "violated", rel);
}

// 9: every report produced above already went through the structural audit:
// Boolean assignment rows with at most one owner per subcarrier, a
// receiver-common harvesting split (continuous) and one-hot level picks
// (discrete), metrics that match the policy, and constraint slacks inside
// their tolerances unless the run is flagged infeasible with zeroed figures.
void check9() {
  bool ok = g_audited > 0 && g_audit.empty();
  if (ok) {
    verdict(9, true, "%d solve reports audited, 0 structural violations", g_audited);
  } else {
    verdict(9, false, "%d violations across %d reports; first: %s", (int)g_audit.size(),
            g_audited, g_audit.empty() ? "(none)" : g_audit.front().c_str());
  }
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  check1();
  check2();
  check3();
  check4();
  check5();
  check6();
  check7();
  check8();
  check9();
  std::printf("acceptance: %d/9 passed, %.0f s\n", 9 - g_failures, elapsed_s(t0));
  return g_failures == 0 ? 0 : 1;
}
