#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "swipt/channel.hpp"
#include "swipt/config.hpp"
#include "swipt/objective.hpp"

using namespace swipt;

namespace {

// Two receivers, two subcarriers, clean numbers. Everything downstream of this
// fixture is checked against values computed once by hand.
ChannelRealization hand_channel() {
  ChannelRealization ch;
  ch.n_subcarriers = 2;
  ch.n_receivers = 2;
  ch.gain = Grid(2, 2);
  ch.gain(0, 0) = 1.2;
  ch.gain(1, 0) = 0.7;
  ch.gain(0, 1) = 0.3;
  ch.gain(1, 1) = 2.0;
  ch.path_loss = {0.01, 0.02};
  ch.shadowing = {1.0, 0.5};
  ch.distance_m = {3.0, 4.0};
  ch.sigma_int_w = Grid(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) ch.sigma_int_w(i, k) = 1e-9;
  ch.seed = 7;
  return ch;
}

SystemConfig hand_config() {
  SystemConfig cfg = default_config();
  cfg.n_receivers = 2;
  cfg.n_subcarriers = 2;
  cfg.subcarrier_bw_hz = 1e6;
  cfg.sigma_ant_w = 1e-9;
  cfg.sigma_proc_w = 1e-8;
  cfg.sigma_int_w = 1e-9;
  cfg.eps_pa = 4.0;
  cfg.p_max_w = 2.0;
  cfg.p_pg_w = 100.0;
  cfg.p_ct_w = 1.0;
  cfg.p_cr_w = 0.1;
  cfg.eta = {0.8, 0.5};
  cfg.alpha = {1.0, 2.0};
  cfg.r_min_k_bps = {0.0, 0.0};
  cfg.p_req_w = {0.0, 0.0};
  cfg.delay_set = {};
  cfg.r_min_bps = 0.0;
  cfg.los_gain = {1.0, 0.5};
  return cfg;
}

ContinuousPolicy hand_policy() {
  ContinuousPolicy pol(2, 2);
  pol.assign(0, 0) = 1.0;
  pol.assign(1, 1) = 1.0;
  pol.power(0, 0) = 0.5;
  pol.power(1, 1) = 0.25;
  pol.rho_i(0, 0) = 0.6;
  pol.rho_i(1, 1) = 0.9;
  pol.rho_e = {0.4, 0.1};
  return pol;
}

bool has_constraint(const std::vector<Violation>& v, const std::string& name) {
  for (const auto& x : v)
    if (x.constraint == name) return true;
  return false;
}

}  // namespace

TEST_CASE("splitter SINR: signal and antenna-stage noise scale, processing noise does not") {
  // 0 dBm through a unit channel, even antenna and processing noise floors.
  CHECK(sinr(1e-3, 1.0, 0.999, 1e-6, 1e-6) == doctest::Approx(499.7498749374688).epsilon(1e-12));
  CHECK(subcarrier_rate_bps(1.0, 1e-3, 1.0, 0.999, 1e-6, 1e-6) ==
        doctest::Approx(8.967946345498946).epsilon(1e-12));

  CHECK(sinr(0.0, 1.0, 0.5, 1e-6, 1e-6) == 0.0);
  // rho_i = 0 with no processing noise: nothing reaches the decoder, guard returns 0.
  CHECK(sinr(1e-3, 1.0, 0.0, 1e-6, 0.0) == 0.0);
  CHECK(subcarrier_rate_bps(1e6, 1e-3, 1.0, 0.0, 1e-6, 0.0) == 0.0);

  // More split toward decoding always helps as long as the post-split stage adds noise.
  double lo = sinr(1e-3, 1.0, 0.25, 1e-6, 1e-6);
  double mid = sinr(1e-3, 1.0, 0.5, 1e-6, 1e-6);
  double hi = sinr(1e-3, 1.0, 0.75, 1e-6, 1e-6);
  CHECK(lo < mid);
  CHECK(mid < hi);
  // With zero processing noise the ratio no longer depends on the split.
  CHECK(sinr(1e-3, 1.0, 0.3, 1e-6, 0.0) == doctest::Approx(sinr(1e-3, 1.0, 0.9, 1e-6, 0.0)));
}

TEST_CASE("harvested power sums scheduled signal plus noise pickup, scaled by eta and rho_e") {
  auto cfg = hand_config();
  auto ch = hand_channel();
  auto pol = hand_policy();

  // receiver 0 hears its own subcarrier 0 and receiver 1's power on subcarrier 1
  CHECK(harvested_w(cfg, ch, pol, 0) == doctest::Approx(0.0024800012800000005).epsilon(1e-12));
  CHECK(harvested_w(cfg, ch, pol, 1) == doctest::Approx(0.00032500020000000005).epsilon(1e-12));

  // rho_e = 0 kills harvesting entirely, noise pickup included
  pol.rho_e[0] = 0.0;
  CHECK(harvested_w(cfg, ch, pol, 0) == 0.0);

  // harvesting scales linearly in rho_e
  pol.rho_e[0] = 0.8;
  CHECK(harvested_w(cfg, ch, pol, 0) == doctest::Approx(2.0 * 0.0024800012800000005));
}

TEST_CASE("evaluate reproduces hand-computed metrics") {
  auto cfg = hand_config();
  auto ch = hand_channel();
  auto pol = hand_policy();
  Metrics m = evaluate(cfg, ch, pol);

  CHECK(m.rate_bps.size() == 2);
  CHECK(m.rate_bps[0] == doctest::Approx(18294143.137086473).epsilon(1e-12));
  CHECK(m.rate_bps[1] == doctest::Approx(18540782.399354044).epsilon(1e-12));
  // capacity applies the alpha weights, per-receiver rates stay raw
  CHECK(m.capacity_bps == doctest::Approx(55375707.93579456).epsilon(1e-12));
  CHECK(m.transmit_power_w == doctest::Approx(0.75));
  CHECK(m.harvested_w_total ==
        doctest::Approx(0.0024800012800000005 + 0.00032500020000000005).epsilon(1e-12));
  // supply = circuits + PA draw - harvest: 1.0 + 0.2 + 4*0.75 - h
  CHECK(m.supply_power_w == doctest::Approx(4.1971949985200006).epsilon(1e-12));
  CHECK(m.efficiency_bpj == doctest::Approx(13193503.746030608).epsilon(1e-10));
  CHECK(m.efficiency_bpj == doctest::Approx(m.capacity_bps / m.supply_power_w));
}

TEST_CASE("evaluate: unscheduled cells contribute nothing, zero policy draws circuits only") {
  auto cfg = hand_config();
  auto ch = hand_channel();

  ContinuousPolicy pol(2, 2);  // nothing assigned
  pol.power(0, 0) = 5.0;       // power on an unassigned cell must be ignored
  pol.rho_i(0, 0) = 1.0;
  Metrics m = evaluate(cfg, ch, pol);
  CHECK(m.capacity_bps == 0.0);
  CHECK(m.transmit_power_w == 0.0);
  CHECK(m.harvested_w_total == 0.0);  // rho_e both zero
  CHECK(m.supply_power_w == doctest::Approx(1.2));  // p_ct + 2 * p_cr
  CHECK(m.efficiency_bpj == 0.0);
}

TEST_CASE("evaluate at desk scale: all-off policy draws exactly the circuit power") {
  auto cfg = desk_config(3, 16);
  auto ch = generate_realization(cfg, 42);
  ContinuousPolicy pol(16, 3);
  pol.rho_e = {0.0, 0.0, 0.0};
  Metrics m = evaluate(cfg, ch, pol);
  CHECK(m.supply_power_w == doctest::Approx(1.3).epsilon(1e-12));  // 30 dBm + 3 x 20 dBm
  CHECK(m.capacity_bps == 0.0);
  CHECK(m.efficiency_bpj == 0.0);
}

TEST_CASE("collapse flattens mode-indexed decisions") {
  DiscretePolicy dp(2, 2, 2);
  dp.modes_e = {0.5, 0.25};
  dp.modes_i = {0.5, 0.75};
  // receiver 0 picks level 0, receiver 1 level 1
  dp.e_select(0, 0) = 1.0;
  dp.e_select(1, 1) = 1.0;
  dp.assign(0, 0, 0) = 1.0;  // subcarrier 0 -> receiver 0 at mode 0
  dp.power(0, 0, 0) = 0.5;
  dp.assign(1, 1, 1) = 1.0;  // subcarrier 1 -> receiver 1 at mode 1
  dp.power(1, 1, 1) = 0.25;
  dp.power(1, 0, 0) = 9.0;  // unselected cell, must not leak through

  ContinuousPolicy cp = collapse(dp);
  CHECK(cp.rho_e[0] == doctest::Approx(0.5));
  CHECK(cp.rho_e[1] == doctest::Approx(0.25));
  CHECK(cp.assign(0, 0) == 1.0);
  CHECK(cp.assign(1, 1) == 1.0);
  CHECK(cp.assign(1, 0) == 0.0);
  CHECK(cp.power(0, 0) == doctest::Approx(0.5));
  CHECK(cp.power(1, 1) == doctest::Approx(0.25));
  CHECK(cp.power(1, 0) == 0.0);
  CHECK(cp.rho_i(0, 0) == doctest::Approx(0.5));
  CHECK(cp.rho_i(1, 1) == doctest::Approx(0.75));

  // collapsed policy evaluates identically to the discrete one via the shared path
  auto cfg = hand_config();
  auto ch = hand_channel();
  Metrics md = evaluate(cfg, ch, cp);
  CHECK(md.transmit_power_w == doctest::Approx(0.75));
}

TEST_CASE("feasibility: the hand policy passes both modes") {
  auto cfg = hand_config();
  auto ch = hand_channel();
  auto pol = hand_policy();
  CHECK(check_feasible(cfg, ch, pol, FeasibilityMode::Original).empty());
  CHECK(check_feasible(cfg, ch, pol, FeasibilityMode::Relaxed).empty());
}

TEST_CASE("feasibility: each constraint trips on cue") {
  auto cfg = hand_config();
  auto ch = hand_channel();

  SUBCASE("fractional assignment is only legal when relaxed") {
    auto pol = hand_policy();
    pol.assign(0, 0) = 0.5;
    auto orig = check_feasible(cfg, ch, pol, FeasibilityMode::Original);
    CHECK(has_constraint(orig, "C7"));
    auto rel = check_feasible(cfg, ch, pol, FeasibilityMode::Relaxed);
    CHECK(!has_constraint(rel, "C7"));
  }

  SUBCASE("assignment outside [0,1] is never legal") {
    auto pol = hand_policy();
    pol.assign(0, 0) = 1.5;
    CHECK(has_constraint(check_feasible(cfg, ch, pol, FeasibilityMode::Relaxed), "C7"));
  }

  SUBCASE("over-assigned subcarrier") {
    auto pol = hand_policy();
    pol.assign(0, 1) = 1.0;  // subcarrier 0 now claimed by both receivers
    pol.rho_i(0, 1) = 0.5;
    CHECK(has_constraint(check_feasible(cfg, ch, pol), "C8"));
  }

  SUBCASE("harvesting floor") {
    auto pol = hand_policy();
    cfg.p_req_w = {1.0, 0.0};  // way above what 0.75 W can deliver
    auto v = check_feasible(cfg, ch, pol);
    CHECK(has_constraint(v, "C1"));
    // relaxed mode checks the same floor in ratio form; still violated
    CHECK(has_constraint(check_feasible(cfg, ch, pol, FeasibilityMode::Relaxed), "C1"));
  }

  SUBCASE("radiated power cap") {
    auto pol = hand_policy();
    cfg.p_max_w = 0.5;
    CHECK(has_constraint(check_feasible(cfg, ch, pol), "C2"));
  }

  SUBCASE("grid draw cap") {
    auto pol = hand_policy();
    cfg.p_pg_w = 3.0;  // p_ct + eps*0.75 = 4.0 exceeds it
    CHECK(has_constraint(check_feasible(cfg, ch, pol), "C3"));
  }

  SUBCASE("aggregate rate floor") {
    auto pol = hand_policy();
    cfg.r_min_bps = 1e9;
    CHECK(has_constraint(check_feasible(cfg, ch, pol), "C4"));
  }

  SUBCASE("per-receiver rate floor binds only on delay receivers") {
    auto pol = hand_policy();
    cfg.r_min_k_bps = {1e9, 1e9};
    CHECK(!has_constraint(check_feasible(cfg, ch, pol), "C5"));  // delay set empty
    cfg.delay_set = {0};
    CHECK(has_constraint(check_feasible(cfg, ch, pol), "C5"));
  }

  SUBCASE("negative power") {
    auto pol = hand_policy();
    pol.power(0, 0) = -0.1;
    CHECK(has_constraint(check_feasible(cfg, ch, pol), "C6"));
  }

  SUBCASE("harvesting split box") {
    auto pol = hand_policy();
    cfg.rho_e_min = 0.45;  // hand policy uses 0.4 and 0.1
    CHECK(has_constraint(check_feasible(cfg, ch, pol), "C9"));
  }

  SUBCASE("information split box binds only where scheduled") {
    auto pol = hand_policy();
    pol.rho_i(1, 0) = 5.0;  // unscheduled cell, ignored
    CHECK(check_feasible(cfg, ch, pol).empty());
    cfg.rho_i_max = 0.55;  // scheduled cell (0,0) uses 0.6
    CHECK(has_constraint(check_feasible(cfg, ch, pol), "C10"));
  }

  SUBCASE("splits on one subcarrier cannot exceed the incoming signal") {
    auto pol = hand_policy();
    pol.rho_e[0] = 0.5;  // 0.6 + 0.5 > 1 on subcarrier 0
    CHECK(has_constraint(check_feasible(cfg, ch, pol), "C11"));
  }

  SUBCASE("shape mismatch short-circuits") {
    ContinuousPolicy bad(1, 2);
    auto v = check_feasible(cfg, ch, bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].constraint == "shape");
  }
}

TEST_CASE("feasibility, discrete: selector rules then the collapsed checks") {
  auto cfg = hand_config();
  cfg.modes_e = {0.5, 0.25};
  cfg.modes_i = {0.5, 0.75};
  auto ch = hand_channel();

  DiscretePolicy dp(2, 2, 2);
  dp.modes_e = cfg.modes_e;
  dp.modes_i = cfg.modes_i;
  dp.e_select(0, 0) = 1.0;
  dp.e_select(1, 1) = 1.0;
  dp.assign(0, 0, 0) = 1.0;
  dp.power(0, 0, 0) = 0.5;
  dp.assign(1, 1, 1) = 1.0;
  dp.power(1, 1, 1) = 0.25;
  CHECK(check_feasible(cfg, ch, dp).empty());

  SUBCASE("every receiver must pick exactly one energy level") {
    dp.e_select(1, 1) = 0.0;
    CHECK(has_constraint(check_feasible(cfg, ch, dp), "C14"));
    dp.e_select(1, 0) = 1.0;
    dp.e_select(1, 1) = 1.0;  // two picks is just as bad
    CHECK(has_constraint(check_feasible(cfg, ch, dp), "C14"));
  }

  SUBCASE("fractional level pick") {
    dp.e_select(0, 0) = 0.5;
    dp.e_select(0, 1) = 0.5;
    CHECK(has_constraint(check_feasible(cfg, ch, dp), "C14"));
  }

  SUBCASE("one information level per scheduled subcarrier") {
    dp.assign(0, 0, 1) = 1.0;  // second mode on the same (i,k)
    dp.power(0, 0, 1) = 0.1;
    auto v = check_feasible(cfg, ch, dp);
    CHECK(has_constraint(v, "C15"));
  }

  SUBCASE("mode-set size mismatch is a shape error") {
    dp.modes_e = {0.5};
    auto v = check_feasible(cfg, ch, dp);
    REQUIRE(v.size() == 1);
    CHECK(v[0].constraint == "shape");
  }

  SUBCASE("collapsed checks still apply") {
    cfg.p_max_w = 0.5;
    CHECK(has_constraint(check_feasible(cfg, ch, dp), "C2"));
  }
}
