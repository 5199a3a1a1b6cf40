#include "swipt/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "swipt/channel.hpp"

namespace swipt {

namespace {

// fixed %.12g so the same numbers always print the same bytes
std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string dbm_or_neg_inf(double watt) {
  if (watt <= 0.0) return "-inf";
  return num(watt_to_dbm(watt));
}

}  // namespace

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

std::string csv_escape(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string metrics_csv_header() {
  return "seed,K,n_F,P_max_dbm,sigma_int_dbm,algorithm,feasible,capacity_bps,power_w,"
         "efficiency_bpj,harvested_w_total,iterations\n";
}

std::string metrics_csv(const SystemConfig& cfg, const std::vector<DrawResult>& draws) {
  std::ostringstream os;
  os << metrics_csv_header();
  for (const DrawResult& d : draws) {
    os << d.seed << ',' << cfg.n_receivers << ',' << cfg.n_subcarriers << ','
       << dbm_or_neg_inf(cfg.p_max_w) << ',' << dbm_or_neg_inf(cfg.sigma_int_w) << ','
       << algorithm_name(d.algorithm) << ',' << (d.feasible ? 1 : 0) << ','
       << num(d.metrics.capacity_bps) << ',' << num(d.metrics.supply_power_w) << ','
       << num(d.metrics.efficiency_bpj) << ',' << num(d.metrics.harvested_w_total) << ','
       << d.iterations << '\n';
  }
  return os.str();
}

std::string trace_csv(const std::vector<TraceRow>& rows, bool with_modes) {
  std::ostringstream os;
  os << "iteration,q_bpj,q_original_bpj,bound_ratio,dual_residual";
  if (with_modes) os << ",mode_e";
  os << '\n';
  for (const TraceRow& r : rows) {
    os << r.iteration << ',' << num(r.q_bpj) << ',' << num(r.q_original_bpj) << ','
       << num(r.bound_ratio) << ',' << num(r.dual_residual);
    if (with_modes) os << ',' << csv_escape(r.mode_e);
    os << '\n';
  }
  return os.str();
}

std::string results_csv_header() {
  return "parameter,value,algorithm,n_draws,n_feasible,n_errors,failed,capacity_bps,power_w,"
         "efficiency_bpj,harvested_w_total\n";
}

std::string results_csv_row(const std::string& parameter, double value, Algorithm alg,
                            const PointSummary& ps) {
  std::ostringstream os;
  os << csv_escape(parameter) << ',' << num(value) << ',' << algorithm_name(alg) << ','
     << ps.n_draws << ',' << ps.n_feasible << ',' << ps.n_errors << ',' << (ps.failed ? 1 : 0)
     << ',' << num(ps.capacity_bps) << ',' << num(ps.power_w) << ',' << num(ps.efficiency_bpj)
     << ',' << num(ps.harvested_w_total) << '\n';
  return os.str();
}

std::string results_csv(const SweepResult& result) {
  std::string out = results_csv_header();
  for (size_t vi = 0; vi < result.spec.values.size(); ++vi)
    for (size_t ai = 0; ai < result.spec.algorithms.size(); ++ai)
      out += results_csv_row(result.spec.parameter, result.spec.values[vi],
                             result.spec.algorithms[ai], result.points[vi][ai]);
  return out;
}

std::string plot_csv(const SweepResult& result, const std::string& metric) {
  auto pick = [&metric](const PointSummary& ps) -> double {
    if (metric == "efficiency_bpj") return ps.efficiency_bpj;
    if (metric == "capacity_bps") return ps.capacity_bps;
    if (metric == "harvested_w_total") return ps.harvested_w_total;
    throw std::invalid_argument("unknown plot metric: " + metric);
  };
  std::ostringstream os;
  os << "x,series,y\n";
  for (size_t vi = 0; vi < result.spec.values.size(); ++vi)
    for (size_t ai = 0; ai < result.spec.algorithms.size(); ++ai)
      os << num(result.spec.values[vi]) << ','
         << algorithm_name(result.spec.algorithms[ai]) << ','
         << num(pick(result.points[vi][ai])) << '\n';
  return os.str();
}

std::string realization_text(const ChannelRealization& ch) {
  std::ostringstream os;
  write_realization(os, ch);
  return os.str();
}

}  // namespace swipt
