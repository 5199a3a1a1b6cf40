#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace swipt {

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);  // requires watt > 0

struct DinkelbachOptions {
  double tol = 1e-6;        // relative: stop when the q increment falls below tol*q
  int max_iterations = 20;  // outer iteration cap
};

struct DualOptions {
  double tol = 1e-6;  // relative multiplier change per inner iteration
  int max_iterations = 500;
  double armijo_c = 1e-4;  // sufficient-decrease constant for the line search
  double shrink = 0.5;     // backtracking shrink factor
  double step0 = 1.0;      // initial step length
  int max_halvings = 30;
};

// Full system description. All powers in Watts, rates in bit/s, bandwidths in Hz.
struct SystemConfig {
  int n_receivers = 3;     // K
  int n_subcarriers = 128; // n_F

  double bandwidth_hz = 20e6;
  double subcarrier_bw_hz = 156250.0;  // W = bandwidth_hz / n_subcarriers
  double carrier_hz = 470e6;

  // Noise model: sigma_ant is picked up by the antenna ahead of the power splitter,
  // sigma_proc is added after it by the decoding chain (thermal + quantization, so the
  // quantization floor dominates). Per-subcarrier powers.
  double sigma_ant_w = 3.1622776601683794e-15;   // -115 dBm
  double sigma_proc_w = 2.0012306074699886e-08;  // -112 dBm thermal + -47 dBm quantization
  double sigma_int_w = 3.1622776601683795e-09;   // -55 dBm, moderate interference default

  double eps_pa = 6.25;  // PA inefficiency multiplier on radiated power
  double p_max_w = 1.0;  // C2 radiated-power budget (30 dBm default)
  double p_pg_w = 100.0; // C3 power-grid draw limit (50 dBm)
  double p_ct_w = 1.0;   // transmitter circuit power (30 dBm)
  double p_cr_w = 0.1;   // per-receiver circuit power (20 dBm)

  std::vector<double> eta;        // per-receiver harvesting efficiency
  std::vector<double> alpha;      // per-receiver rate weights
  std::vector<double> r_min_k_bps;// per-receiver rate floor, applies to delay_set members
  std::vector<double> p_req_w;    // per-receiver minimum harvested power (C1)
  std::vector<int> delay_set;     // 0-based receiver indices with an individual rate floor
  double r_min_bps = 50e6;        // aggregate rate floor (C4)

  // Continuous splitting-ratio box (C9/C10).
  double rho_e_min = 0.0, rho_e_max = 1.0;
  double rho_i_min = 0.0, rho_i_max = 1.0;

  // Discrete splitting-ratio mode sets (same length N, shared by all receivers).
  std::vector<double> modes_e;
  std::vector<double> modes_i;

  // Link model.
  double rician_k_db = 6.0;
  double antenna_gain_db = 12.0;
  double d_min_m = 1.0, d_max_m = 10.0;
  double pl_break_m = 5.0;     // two-slope breakpoint
  double pl_exp_near = 2.0;    // path-loss exponent up to the breakpoint
  double pl_exp_far = 3.5;     // and beyond it
  std::vector<double> los_gain;  // per-receiver shadowing/LOS factor g_k

  DinkelbachOptions dinkelbach;
  DualOptions dual;
  uint64_t seed = 1;

  int n_modes() const { return static_cast<int>(modes_e.size()); }
};

// Reference parameter set used throughout the experiments.
SystemConfig default_config();

// Same constants at a small problem size (quick runs, tests). Scales n_F and keeps
// the transfer floor attainable at desk scale (-20 dBm instead of 0 dBm).
SystemConfig desk_config(int n_receivers = 3, int n_subcarriers = 16);

// Every violated validity rule as a human-readable message; empty means usable.
std::vector<std::string> validate(const SystemConfig& cfg);

struct ConfigError {
  std::vector<std::string> messages;
};

// key=value file, '#' comments, powers accept a `dbm` or `w` suffix.
// Unknown keys and malformed values are collected and thrown as ConfigError.
SystemConfig load_config_file(const std::string& path);
SystemConfig parse_config_text(const std::string& text);  // same grammar, from memory

}  // namespace swipt
