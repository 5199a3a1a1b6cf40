#include "swipt/channel.hpp"

#include <cmath>
#include <ostream>

namespace swipt {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kLightSpeed = 2.998e8;  // m/s

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

uint64_t derive_seed(uint64_t master, uint64_t index) {
  // Two mixing rounds decorrelate consecutive indices under any master.
  return splitmix64(splitmix64(master + 0x9e3779b97f4a7c15ULL * (index + 1)));
}

double Rng::uniform() {
  // 53-bit mantissa in [0, 1)
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 shifted into (0, 1] so the log is finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

double path_loss_linear(double d_m, const SystemConfig& cfg) {
  // Free-space intercept at 1 m, then two log-distance slopes.
  double l0_db = 20.0 * std::log10(4.0 * kPi * cfg.carrier_hz / kLightSpeed);
  double d_near = std::min(d_m, cfg.pl_break_m);
  double loss_db = l0_db + 10.0 * cfg.pl_exp_near * std::log10(d_near);
  if (d_m > cfg.pl_break_m)
    loss_db += 10.0 * cfg.pl_exp_far * std::log10(d_m / cfg.pl_break_m);
  return std::pow(10.0, (cfg.antenna_gain_db - loss_db) / 10.0);
}

std::complex<double> draw_rician(Rng& rng, double k_lin) {
  double theta = 2.0 * kPi * rng.uniform();
  std::complex<double> los = std::sqrt(k_lin / (k_lin + 1.0)) *
                             std::complex<double>(std::cos(theta), std::sin(theta));
  // scatter component CN(0,1): unit total power split across both quadratures
  std::complex<double> nlos(rng.normal() * std::sqrt(0.5), rng.normal() * std::sqrt(0.5));
  return los + nlos / std::sqrt(k_lin + 1.0);
}

ChannelRealization generate_realization(const SystemConfig& cfg, uint64_t seed) {
  ChannelRealization ch;
  ch.n_subcarriers = cfg.n_subcarriers;
  ch.n_receivers = cfg.n_receivers;
  ch.seed = seed;
  ch.gain = Grid(cfg.n_subcarriers, cfg.n_receivers);
  ch.sigma_int_w = Grid(cfg.n_subcarriers, cfg.n_receivers, cfg.sigma_int_w);
  ch.path_loss.resize(cfg.n_receivers);
  ch.shadowing = cfg.los_gain;
  ch.distance_m.resize(cfg.n_receivers);

  Rng rng(seed);
  const double k_lin = std::pow(10.0, cfg.rician_k_db / 10.0);
  for (int k = 0; k < cfg.n_receivers; ++k) {
    ch.distance_m[k] = cfg.d_min_m + (cfg.d_max_m - cfg.d_min_m) * rng.uniform();
    ch.path_loss[k] = path_loss_linear(ch.distance_m[k], cfg);
  }
  for (int k = 0; k < cfg.n_receivers; ++k)
    for (int i = 0; i < cfg.n_subcarriers; ++i)
      ch.gain(i, k) = std::norm(draw_rician(rng, k_lin));
  return ch;
}

void write_realization(std::ostream& os, const ChannelRealization& ch) {
  os << "# seed " << ch.seed << "\n";
  os << "# receivers " << ch.n_receivers << " subcarriers " << ch.n_subcarriers << "\n";
  for (int k = 0; k < ch.n_receivers; ++k)
    os << "# receiver " << k << " distance_m " << ch.distance_m[k] << " path_loss "
       << ch.path_loss[k] << " shadowing " << ch.shadowing[k] << "\n";
  os << "# columns: subcarrier receiver effective_gain sigma_int_w\n";
  os.precision(17);
  for (int i = 0; i < ch.n_subcarriers; ++i)
    for (int k = 0; k < ch.n_receivers; ++k)
      os << i << " " << k << " " << effective_gain(ch, i, k) << " " << ch.sigma_int_w(i, k)
         << "\n";
}

}  // namespace swipt
