#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swipt/cli.hpp"
#include "swipt/csvio.hpp"
#include "swipt/oracle.hpp"

namespace py = pybind11;

namespace {

using namespace swipt;

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["capacity_bps"] = m.capacity_bps;
  d["transmit_power_w"] = m.transmit_power_w;
  d["supply_power_w"] = m.supply_power_w;
  d["harvested_w_total"] = m.harvested_w_total;
  d["harvested_w"] = m.harvested_w;
  d["rate_bps"] = m.rate_bps;
  d["efficiency_bpj"] = m.efficiency_bpj;
  return d;
}

template <typename Report>
py::dict report_dict(const Report& rep) {
  py::dict d;
  d["feasible"] = rep.feasible;
  d["q_bpj"] = rep.q_bpj;
  d["q_original_bpj"] = rep.q_original_bpj;
  d["outer_iterations"] = rep.outer_iterations;
  d["q_trajectory"] = rep.q_trajectory;
  d["q_original_trajectory"] = rep.q_original_trajectory;
  d["dual_residual"] = rep.dual_residual;
  d["status"] = rep.status;
  d["metrics"] = metrics_dict(rep.metrics);
  return d;
}

py::dict solve_py(const SystemConfig& cfg, uint64_t seed, const std::string& algorithm) {
  auto errs = validate(cfg);
  if (!errs.empty()) throw py::value_error("invalid config: " + errs.front());
  auto alg = parse_algorithm(algorithm);
  if (!alg) throw py::value_error("unknown algorithm: " + algorithm);
  ChannelRealization ch = generate_realization(cfg, seed);
  switch (*alg) {
    case Algorithm::ProposedContinuous: return report_dict(solve_continuous(cfg, ch));
    case Algorithm::ProposedDiscrete: {
      DiscreteSolveReport rep = solve_discrete(cfg, ch);
      py::dict d = report_dict(rep);
      d["mode_e_trajectory"] = rep.mode_e_trajectory;
      return d;
    }
    case Algorithm::Baseline1: return report_dict(baseline_capacity(cfg, ch));
    case Algorithm::Baseline2: return report_dict(baseline_no_harvest(cfg, ch));
  }
  throw py::value_error("unknown algorithm: " + algorithm);
}

py::dict point_dict(const PointSummary& ps) {
  py::dict d;
  d["n_draws"] = ps.n_draws;
  d["n_feasible"] = ps.n_feasible;
  d["n_errors"] = ps.n_errors;
  d["failed"] = ps.failed;
  d["capacity_bps"] = ps.capacity_bps;
  d["power_w"] = ps.power_w;
  d["efficiency_bpj"] = ps.efficiency_bpj;
  d["harvested_w_total"] = ps.harvested_w_total;
  return d;
}

py::dict run_point_py(const SystemConfig& cfg, const std::string& algorithm, int n_draws,
                      uint64_t seed, int jobs) {
  auto alg = parse_algorithm(algorithm);
  if (!alg) throw py::value_error("unknown algorithm: " + algorithm);
  PointSummary ps;
  {
    py::gil_scoped_release release;
    ps = run_point(cfg, *alg, n_draws, seed, jobs);
  }
  return point_dict(ps);
}

py::list trace_py(const SystemConfig& cfg, uint64_t seed) {
  ChannelRealization ch = generate_realization(cfg, seed);
  py::list out;
  for (const TraceRow& r : convergence_trace(cfg, ch)) {
    py::dict d;
    d["iteration"] = r.iteration;
    d["q_bpj"] = r.q_bpj;
    d["q_original_bpj"] = r.q_original_bpj;
    d["bound_ratio"] = r.bound_ratio;
    d["dual_residual"] = r.dual_residual;
    out.append(d);
  }
  return out;
}

py::list sweep_py(const SystemConfig& base, const std::string& parameter,
                  const std::vector<double>& values, const std::vector<std::string>& algorithms,
                  int n_draws, uint64_t seed, int jobs) {
  SweepSpec spec;
  spec.parameter = parameter;
  spec.values = values;
  for (const std::string& name : algorithms) {
    auto a = parse_algorithm(name);
    if (!a) throw py::value_error("unknown algorithm: " + name);
    spec.algorithms.push_back(*a);
  }
  spec.n_draws = n_draws;
  spec.jobs = jobs;
  SweepResult res;
  {
    py::gil_scoped_release release;
    res = run_sweep(base, spec, seed);
  }
  py::list rows;
  for (size_t vi = 0; vi < spec.values.size(); ++vi)
    for (size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
      py::dict d = point_dict(res.points[vi][ai]);
      d["value"] = spec.values[vi];
      d["algorithm"] = algorithm_name(spec.algorithms[ai]);
      rows.append(d);
    }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "energy-efficiency resource allocation for power-splitting receivers";

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_readwrite("n_receivers", &SystemConfig::n_receivers)
      .def_readwrite("n_subcarriers", &SystemConfig::n_subcarriers)
      .def_readwrite("bandwidth_hz", &SystemConfig::bandwidth_hz)
      .def_readwrite("subcarrier_bw_hz", &SystemConfig::subcarrier_bw_hz)
      .def_readwrite("sigma_ant_w", &SystemConfig::sigma_ant_w)
      .def_readwrite("sigma_proc_w", &SystemConfig::sigma_proc_w)
      .def_readwrite("sigma_int_w", &SystemConfig::sigma_int_w)
      .def_readwrite("eps_pa", &SystemConfig::eps_pa)
      .def_readwrite("p_max_w", &SystemConfig::p_max_w)
      .def_readwrite("p_pg_w", &SystemConfig::p_pg_w)
      .def_readwrite("p_ct_w", &SystemConfig::p_ct_w)
      .def_readwrite("p_cr_w", &SystemConfig::p_cr_w)
      .def_readwrite("eta", &SystemConfig::eta)
      .def_readwrite("alpha", &SystemConfig::alpha)
      .def_readwrite("r_min_k_bps", &SystemConfig::r_min_k_bps)
      .def_readwrite("p_req_w", &SystemConfig::p_req_w)
      .def_readwrite("delay_set", &SystemConfig::delay_set)
      .def_readwrite("r_min_bps", &SystemConfig::r_min_bps)
      .def_readwrite("rho_e_min", &SystemConfig::rho_e_min)
      .def_readwrite("rho_e_max", &SystemConfig::rho_e_max)
      .def_readwrite("rho_i_min", &SystemConfig::rho_i_min)
      .def_readwrite("rho_i_max", &SystemConfig::rho_i_max)
      .def_readwrite("modes_e", &SystemConfig::modes_e)
      .def_readwrite("modes_i", &SystemConfig::modes_i)
      .def_readwrite("seed", &SystemConfig::seed)
      .def("n_modes", &SystemConfig::n_modes);

  m.def("default_config", &default_config, "reference parameter set");
  m.def("desk_config", &desk_config, py::arg("n_receivers") = 3, py::arg("n_subcarriers") = 16,
        "reduced-scale parameter set for quick runs");
  m.def("load_config", &load_config_file, py::arg("path"), "parse a key=value config file");
  m.def("validate", &validate, py::arg("config"), "list of config problems, empty when usable");
  m.def("dbm_to_watt", &dbm_to_watt);
  m.def("watt_to_dbm", &watt_to_dbm);

  m.def("solve", &solve_py, py::arg("config"), py::arg("seed") = 1,
        py::arg("algorithm") = "continuous",
        "solve one channel realization, returns a report dict");
  m.def("run_point", &run_point_py, py::arg("config"), py::arg("algorithm"), py::arg("n_draws"),
        py::arg("seed") = 1, py::arg("jobs") = 1,
        "Monte Carlo averages at one parameter point (zeros for infeasible draws)");
  m.def("run_sweep", &sweep_py, py::arg("config"), py::arg("parameter"), py::arg("values"),
        py::arg("algorithms"), py::arg("n_draws") = 100, py::arg("seed") = 1, py::arg("jobs") = 1,
        "one averaged row per (value, algorithm)");
  m.def("convergence_trace", &trace_py, py::arg("config"), py::arg("seed") = 1,
        "outer-iteration trace rows for one realization");
  m.def("run_cli", &run_cli, py::arg("args"), "invoke the command-line front end in-process");

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      std::string joined;
      for (const std::string& msg : e.messages) {
        if (!joined.empty()) joined += "; ";
        joined += msg;
      }
      PyErr_SetString(PyExc_ValueError, joined.c_str());
    }
  });
}
