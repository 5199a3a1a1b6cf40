#pragma once
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <random>

#include "swipt/config.hpp"
#include "swipt/grid.hpp"

namespace swipt {

// Deterministic generator: mt19937_64 plus explicit Box-Muller so draws do not
// depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double uniform();   // [0, 1)
  double normal();    // standard normal
  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable per-draw seed derivation so parallel and serial sweeps agree.
uint64_t derive_seed(uint64_t master, uint64_t index);

struct ChannelRealization {
  int n_subcarriers = 0;
  int n_receivers = 0;
  Grid gain;                       // |H_{i,k}|^2 small-scale power gains
  std::vector<double> path_loss;   // l_k, linear, antenna gain included
  std::vector<double> shadowing;   // g_k
  std::vector<double> distance_m;  // d_k
  Grid sigma_int_w;                // interference power per (i,k)
  uint64_t seed = 0;
};

// Linear channel power gain l_k * g_k * |H_{i,k}|^2 seen by receiver k on subcarrier i.
inline double effective_gain(const ChannelRealization& ch, int i, int k) {
  return ch.path_loss[k] * ch.shadowing[k] * ch.gain(i, k);
}

// Two-slope distance power gain (linear, antenna gain folded in). d_m > 0.
double path_loss_linear(double d_m, const SystemConfig& cfg);

// Unit-mean-power Rician fading sample with linear K-factor k_lin >= 0.
std::complex<double> draw_rician(Rng& rng, double k_lin);

// Distances uniform in [d_min, d_max], i.i.d. fading per (i,k), interference from config.
ChannelRealization generate_realization(const SystemConfig& cfg, uint64_t seed);

// Flat text table: commented receiver header, then one row per (i,k).
void write_realization(std::ostream& os, const ChannelRealization& ch);

}  // namespace swipt
