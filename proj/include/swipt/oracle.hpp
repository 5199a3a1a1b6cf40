#pragma once
#include <functional>
#include <vector>

#include "swipt/channel.hpp"
#include "swipt/objective.hpp"

namespace swipt {

// Exhaustive reference for small mode-indexed instances: every subcarrier
// assignment x information mode, every energy-mode choice, powers from a grid.
// extra_powers are injected into the grid (e.g. a solver's chosen values).
struct BruteForceResult {
  bool feasible = false;
  double efficiency_bpj = 0.0;
  DiscretePolicy policy;
  Metrics metrics;
  long long evaluated = 0;
};
BruteForceResult brute_force_discrete(const SystemConfig& cfg, const ChannelRealization& ch,
                                      const std::vector<double>& power_grid_w,
                                      const std::vector<double>& extra_powers_w = {});

// Root of F(q) = max_x {U - q U_TP} by sign bisection. F must be positive at
// q_lo and nonpositive at q_hi (its sign is nonincreasing in q); the bracket
// is halved until narrower than tol. Throws when the endpoints agree in sign.
struct BisectionResult {
  double q = 0.0;
  double residual = 0.0;  // F at the returned q
  int iterations = 0;
};
BisectionResult bisection_ratio_max(const std::function<double(double)>& inner_value,
                                    double q_lo, double q_hi, double tol = 1e-9);

// Efficiency along one power coordinate, all else frozen: true when the
// sampled curve rises then falls (at most one sign change of differences,
// judged at 1e-12 relative tolerance). Samples are log-spaced over
// [1e-6, 10 p_max].
bool unimodality_check(const SystemConfig& cfg, const ChannelRealization& ch,
                       const ContinuousPolicy& pol, int i, int k, int samples);

// Midpoint-concavity probe of the capacity-approximation objective minus
// q times the power lower bound, in the time-shared variables (s P, s rho_i,
// s in (0,1)). Also probes the diagonal curvatures at `point`: power and
// info-split directions nonpositive, harvesting direction flat.
bool concavity_check(const SystemConfig& cfg, const ChannelRealization& ch,
                     const ContinuousPolicy& point, double q, int trials);

// Numerical curvature probes used by the shape tests.
// Second difference (f(x-h) - 2 f(x) + f(x+h)) / h^2 in extended precision.
long double second_difference(const std::function<long double(long double)>& f,
                              long double x, long double h);

// Exact curvatures of the per-subcarrier rate surface, for cross-checking.
// d2/dP2 of log2(P G r / (r s + n)) at fixed r: -1 / (P^2 ln 2).
double rate_curvature_power(double p_w);
// d2/dr2 of log2(P G r / (r s + n)) in r = rho_i at fixed P.
double rate_curvature_split(const SystemConfig& cfg, double rho_i);

}  // namespace swipt
