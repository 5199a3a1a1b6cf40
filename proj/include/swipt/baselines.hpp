#pragma once
#include "swipt/solver_discrete.hpp"

namespace swipt {

// Capacity-maximizing reference: the mode-indexed subproblem at ratio 0,
// single outer pass. Spends power freely up to the grid and amplifier caps.
DiscreteSolveReport baseline_capacity(const SystemConfig& cfg, const ChannelRealization& ch);

// No-harvesting reference: continuous engine with harvesting disabled
// (eta = 0, floor = 0, rho_e pinned to 0, rho_i pinned to 1).
SolveReport baseline_no_harvest(const SystemConfig& cfg, const ChannelRealization& ch);

}  // namespace swipt
