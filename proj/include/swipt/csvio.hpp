#pragma once
#include <string>
#include <vector>

#include "swipt/sim.hpp"

namespace swipt {

// Write via temp file + rename so readers never see a partial file.
void atomic_write(const std::string& path, const std::string& content);

std::string csv_escape(const std::string& field);

// metrics CSV: one row per draw.
// seed,K,n_F,P_max_dbm,sigma_int_dbm,algorithm,feasible,capacity_bps,power_w,
// efficiency_bpj,harvested_w_total,iterations
std::string metrics_csv_header();
std::string metrics_csv(const SystemConfig& cfg, const std::vector<DrawResult>& draws);

// trace CSV: iteration,q_bpj,q_original_bpj,bound_ratio,dual_residual[,mode_e]
std::string trace_csv(const std::vector<TraceRow>& rows, bool with_modes);

// results CSV: one averaged row per (value x algorithm), flags preserved.
// parameter,value,algorithm,n_draws,n_feasible,n_errors,failed,capacity_bps,
// power_w,efficiency_bpj,harvested_w_total
std::string results_csv(const SweepResult& result);
std::string results_csv_header();
std::string results_csv_row(const std::string& parameter, double value, Algorithm alg,
                            const PointSummary& ps);

// plot-data CSV (x,series,y) for one averaged metric:
// "efficiency_bpj", "capacity_bps" or "harvested_w_total".
std::string plot_csv(const SweepResult& result, const std::string& metric);

// Realization table text (see write_realization) as a string.
std::string realization_text(const ChannelRealization& ch);

}  // namespace swipt
