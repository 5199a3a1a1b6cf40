#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "swipt/channel.hpp"
#include "swipt/config.hpp"
#include "swipt/sim.hpp"
#include "swipt/solver_continuous.hpp"

using namespace swipt;

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a : {Algorithm::ProposedContinuous, Algorithm::ProposedDiscrete,
                      Algorithm::Baseline1, Algorithm::Baseline2}) {
    auto back = parse_algorithm(algorithm_name(a));
    REQUIRE(back.has_value());
    CHECK(*back == a);
  }
  CHECK(!parse_algorithm("simulated_annealing").has_value());
  CHECK(!parse_algorithm("").has_value());
}

TEST_CASE("a one-draw point is exactly one direct solve") {
  SystemConfig cfg = desk_config(3, 16);
  uint64_t master = 77;
  PointSummary ps = run_point(cfg, Algorithm::ProposedContinuous, 1, master, 1);
  REQUIRE(ps.n_draws == 1);
  REQUIRE(ps.draws.size() == 1);
  CHECK(ps.draws[0].seed == derive_seed(master, 0));

  auto ch = generate_realization(cfg, derive_seed(master, 0));
  SolveReport rep = solve_continuous(cfg, ch);
  CHECK(ps.draws[0].feasible == rep.feasible);
  CHECK(ps.efficiency_bpj == doctest::Approx(rep.metrics.efficiency_bpj).epsilon(1e-15));
  CHECK(ps.capacity_bps == doctest::Approx(rep.metrics.capacity_bps).epsilon(1e-15));
  CHECK(ps.draws[0].iterations == rep.outer_iterations);
}

TEST_CASE("points are deterministic and thread-count invariant") {
  SystemConfig cfg = desk_config(2, 8);
  PointSummary serial = run_point(cfg, Algorithm::ProposedDiscrete, 6, 123, 1);
  PointSummary threaded = run_point(cfg, Algorithm::ProposedDiscrete, 6, 123, 3);

  CHECK(serial.n_feasible == threaded.n_feasible);
  CHECK(serial.n_errors == threaded.n_errors);
  CHECK(serial.efficiency_bpj == threaded.efficiency_bpj);
  CHECK(serial.capacity_bps == threaded.capacity_bps);
  CHECK(serial.harvested_w_total == threaded.harvested_w_total);
  REQUIRE(serial.draws.size() == threaded.draws.size());
  for (size_t j = 0; j < serial.draws.size(); ++j) {
    CHECK(serial.draws[j].seed == threaded.draws[j].seed);
    CHECK(serial.draws[j].metrics.efficiency_bpj == threaded.draws[j].metrics.efficiency_bpj);
  }
}

TEST_CASE("infeasible draws average in as zeros") {
  SystemConfig cfg = desk_config(3, 16);
  // a rate floor high enough to knock out some draws but not all
  cfg.r_min_bps = 320e6;
  PointSummary ps = run_point(cfg, Algorithm::ProposedContinuous, 24, 2024, 1);
  REQUIRE(ps.n_draws == 24);
  CHECK(ps.n_errors == 0);

  int feasible = 0;
  double cap_sum = 0.0, eff_sum = 0.0, harv_sum = 0.0, pow_sum = 0.0;
  for (const auto& d : ps.draws) {
    if (d.feasible) {
      ++feasible;
      // failed draws keep their diagnostic metrics but contribute nothing
      harv_sum += d.metrics.harvested_w_total;
      pow_sum += d.metrics.supply_power_w;
    } else {
      CHECK(d.metrics.capacity_bps == 0.0);
      CHECK(d.metrics.efficiency_bpj == 0.0);
    }
    cap_sum += d.metrics.capacity_bps;
    eff_sum += d.metrics.efficiency_bpj;
  }
  CHECK(ps.n_feasible == feasible);
  CHECK(ps.capacity_bps == doctest::Approx(cap_sum / 24).epsilon(1e-12));
  CHECK(ps.efficiency_bpj == doctest::Approx(eff_sum / 24).epsilon(1e-12));
  CHECK(ps.harvested_w_total == doctest::Approx(harv_sum / 24).epsilon(1e-12));
  CHECK(ps.power_w == doctest::Approx(pow_sum / 24).epsilon(1e-12));

  // the all-zeros convention can only pull the mean down
  if (feasible > 0) {
    double feas_mean = 0.0;
    for (const auto& d : ps.draws)
      if (d.feasible) feas_mean += d.metrics.efficiency_bpj;
    feas_mean /= feasible;
    CHECK(ps.efficiency_bpj <= feas_mean + 1e-15);
  }
}

TEST_CASE("sweep values rewrite the right config fields") {
  SystemConfig base = desk_config(3, 16);

  SystemConfig a = apply_sweep_value(base, "p_max_dbm", 20.0);
  CHECK(a.p_max_w == doctest::Approx(0.1).epsilon(1e-12));

  SystemConfig b = apply_sweep_value(base, "sigma_int_dbm", -40.0);
  CHECK(b.sigma_int_w == doctest::Approx(1e-7).epsilon(1e-12));

  SystemConfig c = apply_sweep_value(base, "p_cr_dbm", 10.0);
  CHECK(c.p_cr_w == doctest::Approx(0.01).epsilon(1e-12));

  SystemConfig d = apply_sweep_value(base, "iteration_cap", 3.0);
  CHECK(d.dinkelbach.max_iterations == 3);
  CHECK(apply_sweep_value(base, "iteration_cap", 0.0).dinkelbach.max_iterations == 1);

  SystemConfig e = apply_sweep_value(base, "K", 5.0);
  CHECK(e.n_receivers == 5);
  CHECK(e.eta.size() == 5);
  CHECK(e.alpha.size() == 5);
  CHECK(e.p_req_w.size() == 5);
  CHECK(e.eta[4] == doctest::Approx(base.eta.back()));  // padded with the last entry
  CHECK(validate(e).empty());

  SystemConfig f = apply_sweep_value(base, "K", 1.0);
  CHECK(f.n_receivers == 1);
  CHECK(f.eta.size() == 1);
  for (int idx : f.delay_set) CHECK(idx < 1);
  CHECK(validate(f).empty());

  CHECK_THROWS_AS((void)apply_sweep_value(base, "bandwidth", 1.0), std::invalid_argument);
}

TEST_CASE("sweeps pair draws across values and algorithms") {
  SystemConfig base = desk_config(2, 8);
  SweepSpec spec;
  spec.parameter = "p_max_dbm";
  spec.values = {20.0, 30.0};
  spec.algorithms = {Algorithm::ProposedContinuous, Algorithm::Baseline2};
  spec.n_draws = 3;
  spec.jobs = 1;

  std::vector<std::string> order;
  SweepResult res = run_sweep(base, spec, 99, [&](double v, Algorithm a, const PointSummary& ps) {
    order.push_back(algorithm_name(a) + "@" + std::to_string((int)v));
    CHECK(ps.n_draws == 3);
  });

  REQUIRE(res.points.size() == 2);
  REQUIRE(res.points[0].size() == 2);
  REQUIRE(res.points[1].size() == 2);
  REQUIRE(order.size() == 4);
  CHECK(order[0] == "continuous@20");
  CHECK(order[1] == "baseline2@20");
  CHECK(order[2] == "continuous@30");
  CHECK(order[3] == "baseline2@30");

  // common random numbers: draw j at different values shares its seed
  for (int j = 0; j < 3; ++j) {
    CHECK(res.points[0][0].draws[j].seed == res.points[1][0].draws[j].seed);
    CHECK(res.points[0][0].draws[j].seed == res.points[0][1].draws[j].seed);
  }

  // a bad parameter name flags every point failed instead of throwing
  SweepSpec bad = spec;
  bad.parameter = "frequency";
  SweepResult br = run_sweep(base, bad, 99);
  for (const auto& row : br.points)
    for (const auto& ps : row) CHECK(ps.failed);

  SweepSpec empty = spec;
  empty.values.clear();
  CHECK_THROWS_AS((void)run_sweep(base, empty, 99), std::invalid_argument);
}

TEST_CASE("convergence traces: iteration zero, pairing, bound ratio") {
  SystemConfig cfg = desk_config(3, 16);
  auto ch = generate_realization(cfg, 31);
  SolveReport rep = solve_continuous(cfg, ch);
  REQUIRE(rep.feasible);

  auto rows = convergence_trace(rep);
  REQUIRE(rows.size() == rep.q_trajectory.size());
  REQUIRE(rows.size() >= 2);
  CHECK(rows.size() <= static_cast<size_t>(cfg.dinkelbach.max_iterations) + 1);
  CHECK(rows[0].iteration == 0);
  CHECK(rows[0].q_bpj == 0.0);
  CHECK(rows[0].bound_ratio == 0.0);
  CHECK(rows[0].dual_residual == 0.0);
  for (size_t j = 0; j < rows.size(); ++j) {
    CHECK(rows[j].iteration == (int)j);
    CHECK(rows[j].bound_ratio >= 0.0);
    CHECK(rows[j].bound_ratio <= 1.0 + 1e-12);
    if (j >= 1) {
      CHECK(rows[j].q_bpj >= rows[j - 1].q_bpj);
      CHECK(rows[j].dual_residual == rep.dual_residual[j - 1]);
    }
  }
  CHECK(rows.back().bound_ratio == doctest::Approx(1.0));

  // solve-and-trace convenience matches tracing the report
  auto direct = convergence_trace(cfg, ch);
  REQUIRE(direct.size() == rows.size());
  for (size_t j = 0; j < rows.size(); ++j) CHECK(direct[j].q_bpj == rows[j].q_bpj);

  // discrete traces carry the mode strings, offset by the same pairing
  DiscreteSolveReport drep = solve_discrete(cfg, ch);
  auto drows = convergence_trace(drep);
  REQUIRE(drows.size() == drep.q_trajectory.size());
  CHECK(drows[0].mode_e.empty());
  for (size_t j = 1; j < drows.size(); ++j)
    if (j - 1 < drep.mode_e_trajectory.size())
      CHECK(drows[j].mode_e == drep.mode_e_trajectory[j - 1]);
}

TEST_CASE("presets cover the standard experiments and validate") {
  auto names = preset_names();
  REQUIRE(names.size() == 6);
  for (const auto& name : names) {
    CAPTURE(name);
    auto p = lookup_preset(name);
    REQUIRE(p.has_value());
    CHECK(validate(p->config).empty());
    CHECK(!p->describe.empty());
    if (!p->sweep.parameter.empty()) {
      CHECK(!p->sweep.values.empty());
      CHECK(!p->sweep.algorithms.empty());
      // every sweep value must be applicable to the preset's own config
      for (double v : p->sweep.values)
        CHECK(validate(apply_sweep_value(p->config, p->sweep.parameter, v)).empty());
    }
  }
  CHECK(!lookup_preset("fig1").has_value());

  auto fig2 = lookup_preset("fig2");
  REQUIRE(fig2.has_value());
  CHECK(fig2->sweep.parameter == "sigma_int_dbm");
  CHECK(fig2->sweep.n_draws == 1);
  REQUIRE(fig2->sweep.values.size() == 3);

  auto fig3 = lookup_preset("fig3");
  REQUIRE(fig3.has_value());
  CHECK(fig3->sweep.parameter == "p_max_dbm");
  CHECK(fig3->sweep.values.size() == 11);  // 10..30 in 2 dB steps
  CHECK(fig3->sweep.values.front() == doctest::Approx(10.0));
  CHECK(fig3->sweep.values.back() == doctest::Approx(30.0));
  CHECK(fig3->sweep.algorithms.size() == 4);
  CHECK(fig3->sweep.n_draws == 500);

  auto fig4 = lookup_preset("fig4");
  REQUIRE(fig4.has_value());
  CHECK(fig4->sweep.parameter == "K");
  CHECK(fig4->sweep.values.size() == 6);

  auto fig7 = lookup_preset("fig7");
  REQUIRE(fig7.has_value());
  CHECK(fig7->sweep.parameter == "K");
  CHECK(fig7->config.p_cr_w == doctest::Approx(0.1));
  CHECK(fig7->config.p_max_w == doctest::Approx(dbm_to_watt(18.0)));
}
