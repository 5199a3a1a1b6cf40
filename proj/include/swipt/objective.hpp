#pragma once
#include <string>
#include <vector>

#include "swipt/channel.hpp"
#include "swipt/config.hpp"
#include "swipt/grid.hpp"

namespace swipt {

// Per-use transmit powers and information-splitting ratios plus the subcarrier
// assignment. power/rho_i are the values a subcarrier would use if assigned;
// multiply by assign elementwise to get the scheduled quantities.
struct ContinuousPolicy {
  Grid power;             // n_F x K, watts per (i,k)
  Grid assign;            // n_F x K, 0/1
  Grid rho_i;             // n_F x K, information split for (i,k)
  std::vector<double> rho_e;  // K, receiver-common harvesting split

  ContinuousPolicy() : power(0, 0), assign(0, 0), rho_i(0, 0) {}
  ContinuousPolicy(int n_f, int k)
      : power(n_f, k), assign(n_f, k), rho_i(n_f, k), rho_e(k, 0.0) {}
};

// Mode-indexed variant: one column per discrete splitting level.
struct DiscretePolicy {
  Grid3 power;    // n_F x K x N
  Grid3 assign;   // n_F x K x N, 0/1
  Grid e_select;  // K x N, 0/1 energy-mode pick
  std::vector<double> modes_e, modes_i;

  DiscretePolicy() : power(0, 0, 0), assign(0, 0, 0), e_select(0, 0) {}
  DiscretePolicy(int n_f, int k, int n)
      : power(n_f, k, n), assign(n_f, k, n), e_select(k, n) {}
};

// Flatten mode-indexed decisions to per-(i,k) values for shared evaluation.
ContinuousPolicy collapse(const DiscretePolicy& pol);

// SINR of one scheduled subcarrier. rho_i splits the antenna-stage power
// (signal and sigma_bar = antenna + interference variance); processing noise
// is added after the splitter and is not scaled.
double sinr(double p_w, double g, double rho_i, double sigma_bar_w, double sigma_proc_w);
double subcarrier_rate_bps(double w_hz, double p_w, double g, double rho_i,
                           double sigma_bar_w, double sigma_proc_w);

struct Metrics {
  double capacity_bps = 0.0;        // weighted sum rate
  double transmit_power_w = 0.0;    // sum of scheduled powers
  double supply_power_w = 0.0;      // net drawn power
  double harvested_w_total = 0.0;   // sum over receivers
  std::vector<double> harvested_w;  // per receiver
  std::vector<double> rate_bps;     // per receiver, unweighted (rate-floor checks)
  double efficiency_bpj = 0.0;      // capacity / supply
};

Metrics evaluate(const SystemConfig& cfg, const ChannelRealization& ch,
                 const ContinuousPolicy& pol);

// Power a receiver harvests from all subcarriers plus antenna/interference pickup.
double harvested_w(const SystemConfig& cfg, const ChannelRealization& ch,
                   const ContinuousPolicy& pol, int k);

struct Violation {
  std::string constraint;
  double amount = 0.0;  // positive = violated by this much
  std::string detail;
};

// Relaxed mode allows fractional scheduling and checks the harvesting floor in
// its rewritten per-ratio form; Original demands the Boolean problem as posed.
enum class FeasibilityMode { Original, Relaxed };

// All checks the solved policy must satisfy; empty result means feasible.
std::vector<Violation> check_feasible(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const ContinuousPolicy& pol,
                                      FeasibilityMode mode = FeasibilityMode::Original);
std::vector<Violation> check_feasible(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const DiscretePolicy& pol,
                                      FeasibilityMode mode = FeasibilityMode::Original);

}  // namespace swipt
