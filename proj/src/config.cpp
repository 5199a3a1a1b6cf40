#include "swipt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace swipt {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

SystemConfig default_config() {
  SystemConfig c;
  c.n_receivers = 3;
  c.n_subcarriers = 128;
  c.bandwidth_hz = 20e6;
  c.subcarrier_bw_hz = c.bandwidth_hz / c.n_subcarriers;  // 156.25 kHz
  c.carrier_hz = 470e6;
  c.sigma_ant_w = dbm_to_watt(-115.0);
  // signal processing noise: thermal over one subcarrier plus quantization
  c.sigma_proc_w = dbm_to_watt(-112.0) + dbm_to_watt(-47.0);
  c.sigma_int_w = dbm_to_watt(-55.0);
  c.eps_pa = 6.25;            // 16% power amplifier efficiency
  c.p_max_w = dbm_to_watt(30.0);
  c.p_pg_w = dbm_to_watt(50.0);
  c.p_ct_w = dbm_to_watt(30.0);
  c.p_cr_w = dbm_to_watt(20.0);
  c.eta.assign(c.n_receivers, 0.8);
  c.alpha.assign(c.n_receivers, 1.0);
  c.r_min_bps = 50e6;
  c.r_min_k_bps.assign(c.n_receivers, 0.0);
  c.r_min_k_bps[0] = 10e6;
  c.delay_set = {0};
  c.p_req_w.assign(c.n_receivers, dbm_to_watt(0.0));
  c.rho_e_min = 0.0;
  c.rho_e_max = 1.0;
  c.rho_i_min = 0.0;
  c.rho_i_max = 1.0;
  c.modes_e = {1.0, 0.75, 0.5, 0.25, 0.0};
  c.modes_i = {0.0, 0.25, 0.5, 0.75, 1.0};
  c.rician_k_db = 6.0;
  c.antenna_gain_db = 12.0;
  c.d_min_m = 1.0;
  c.d_max_m = 10.0;
  c.pl_break_m = 5.0;
  c.pl_exp_near = 2.0;
  c.pl_exp_far = 3.5;
  c.los_gain.assign(c.n_receivers, 1.0);
  return c;
}

SystemConfig desk_config(int n_receivers, int n_subcarriers) {
  SystemConfig c = default_config();
  c.n_receivers = n_receivers;
  c.n_subcarriers = n_subcarriers;
  // Subcarriers always partition the full band; fewer of them means wider ones,
  // which keeps the rate floors reachable at reduced scale.
  c.subcarrier_bw_hz = c.bandwidth_hz / n_subcarriers;
  c.eta.assign(n_receivers, 0.8);
  c.alpha.assign(n_receivers, 1.0);
  c.r_min_k_bps.assign(n_receivers, 0.0);
  c.r_min_k_bps[0] = 10e6;
  c.delay_set = {0};
  c.p_req_w.assign(n_receivers, dbm_to_watt(-20.0));
  c.los_gain.assign(n_receivers, 1.0);
  return c;
}

static bool all_in_unit(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
}

std::vector<std::string> validate(const SystemConfig& c) {
  std::vector<std::string> err;
  auto bad = [&err](const std::string& m) { err.push_back(m); };

  if (c.n_receivers < 1) bad("n_receivers must be >= 1");
  if (c.n_subcarriers < 1) bad("n_subcarriers must be >= 1");
  if (c.bandwidth_hz <= 0) bad("bandwidth_hz must be positive");
  if (c.subcarrier_bw_hz <= 0) bad("subcarrier_bw_hz must be positive");
  if (c.carrier_hz <= 0) bad("carrier_hz must be positive");
  if (c.sigma_ant_w < 0) bad("sigma_ant_w must be >= 0");
  if (c.sigma_proc_w < 0) bad("sigma_proc_w must be >= 0");
  if (c.sigma_int_w < 0) bad("sigma_int_w must be >= 0");
  if (c.eps_pa < 1.0) bad("eps_pa must be >= 1 (inverse amplifier efficiency)");
  if (c.p_max_w <= 0) bad("p_max_w must be positive");
  if (c.p_pg_w <= 0) bad("p_pg_w must be positive");
  if (c.p_ct_w < 0) bad("p_ct_w must be >= 0");
  if (c.p_cr_w < 0) bad("p_cr_w must be >= 0");
  const size_t K = static_cast<size_t>(std::max(c.n_receivers, 0));
  if (c.eta.size() != K) bad("eta must have one entry per receiver");
  if (c.alpha.size() != K) bad("alpha must have one entry per receiver");
  if (c.r_min_k_bps.size() != K) bad("r_min_k_bps must have one entry per receiver");
  if (c.p_req_w.size() != K) bad("p_req_w must have one entry per receiver");
  if (c.los_gain.size() != K) bad("los_gain must have one entry per receiver");
  if (!all_in_unit(c.eta)) bad("eta entries must lie in [0, 1]");
  for (double a : c.alpha)
    if (a <= 0) bad("alpha entries must be positive");
  for (double r : c.r_min_k_bps)
    if (r < 0) bad("r_min_k_bps entries must be >= 0");
  for (double p : c.p_req_w)
    if (p < 0) bad("p_req_w entries must be >= 0");
  if (c.r_min_bps < 0) bad("r_min_bps must be >= 0");
  for (int k : c.delay_set)
    if (k < 0 || k >= c.n_receivers) bad("delay_set entries must index a receiver");
  auto box_ok = [](double lo, double hi) { return 0.0 <= lo && lo <= hi && hi <= 1.0; };
  if (!box_ok(c.rho_e_min, c.rho_e_max)) bad("rho_e bounds must satisfy 0 <= min <= max <= 1");
  if (!box_ok(c.rho_i_min, c.rho_i_max)) bad("rho_i bounds must satisfy 0 <= min <= max <= 1");
  if (c.modes_e.size() != c.modes_i.size()) bad("modes_e and modes_i must have equal length");
  if (c.modes_e.empty()) bad("mode sets must be non-empty");
  if (!all_in_unit(c.modes_e) || !all_in_unit(c.modes_i)) bad("mode values must lie in [0, 1]");
  for (size_t n = 0; n < std::min(c.modes_e.size(), c.modes_i.size()); ++n)
    if (c.modes_e[n] + c.modes_i[n] > 1.0 + 1e-12)
      bad("paired mode values must satisfy rho_e + rho_i <= 1");
  if (c.d_min_m <= 0 || c.d_max_m < c.d_min_m) bad("need 0 < d_min_m <= d_max_m");
  if (c.pl_break_m <= 0) bad("pl_break_m must be positive");
  if (c.dinkelbach.tol <= 0) bad("dinkelbach.tol must be positive");
  if (c.dinkelbach.max_iterations < 1) bad("dinkelbach.max_iterations must be >= 1");
  if (c.dual.tol <= 0) bad("dual.tol must be positive");
  if (c.dual.max_iterations < 1) bad("dual.max_iterations must be >= 1");
  return err;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v, const std::string& key,
                               std::vector<std::string>& err) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      err.push_back(key + ": cannot parse '" + tok + "' as a number");
    }
  }
  return out;
}

// Accepts "12", "12 dbm", "12dBm", "0.5 w", "5 mw".
double parse_power(const std::string& v, const std::string& key,
                   std::vector<std::string>& err) {
  std::string s = trim(v);
  std::string low;
  for (char ch : s) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  double scale = 1.0;
  bool dbm = false;
  auto ends_with = [&low](const char* suf) {
    std::string t(suf);
    return low.size() >= t.size() && low.compare(low.size() - t.size(), t.size(), t) == 0;
  };
  if (ends_with("dbm")) {
    dbm = true;
    s = trim(s.substr(0, s.size() - 3));
  } else if (ends_with("mw")) {
    scale = 1e-3;
    s = trim(s.substr(0, s.size() - 2));
  } else if (ends_with("w")) {
    s = trim(s.substr(0, s.size() - 1));
  }
  try {
    size_t pos = 0;
    double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return dbm ? dbm_to_watt(x) : x * scale;
  } catch (const std::exception&) {
    err.push_back(key + ": cannot parse power value '" + v + "'");
    return 0.0;
  }
}

double parse_number(const std::string& v, const std::string& key,
                    std::vector<std::string>& err) {
  try {
    size_t pos = 0;
    double x = std::stod(trim(v), &pos);
    if (pos != trim(v).size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    err.push_back(key + ": cannot parse '" + v + "' as a number");
    return 0.0;
  }
}

}  // namespace

SystemConfig parse_config_text(const std::string& text) {
  SystemConfig c = default_config();
  std::vector<std::string> err;
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      err.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      err.push_back("line " + std::to_string(lineno) + ": empty key or value");
      continue;
    }
    if (kv.count(key)) err.push_back("duplicate key '" + key + "'");
    kv[key] = val;
  }

  // Sizes first so per-receiver lists resize against the final K.
  if (kv.count("n_receivers")) c.n_receivers = static_cast<int>(parse_number(kv["n_receivers"], "n_receivers", err));
  if (kv.count("n_subcarriers")) c.n_subcarriers = static_cast<int>(parse_number(kv["n_subcarriers"], "n_subcarriers", err));
  const int K = std::max(c.n_receivers, 1);
  c.eta.assign(K, c.eta.empty() ? 0.8 : c.eta[0]);
  c.alpha.assign(K, 1.0);
  c.r_min_k_bps.assign(K, 0.0);
  if (K > 0) c.r_min_k_bps[0] = 10e6;
  c.p_req_w.assign(K, c.p_req_w.empty() ? dbm_to_watt(0.0) : c.p_req_w[0]);
  c.los_gain.assign(K, 1.0);
  c.delay_set = {0};

  auto scalar_per_receiver = [&](const std::string& key, std::vector<double>& field,
                                 bool power) {
    if (!kv.count(key)) return;
    std::string v = kv[key];
    if (v.find(',') != std::string::npos) {
      std::vector<double> lst;
      if (power) {
        std::stringstream s2(v);
        std::string tok;
        while (std::getline(s2, tok, ',')) lst.push_back(parse_power(tok, key, err));
      } else {
        lst = parse_list(v, key, err);
      }
      if (static_cast<int>(lst.size()) != K)
        err.push_back(key + ": expected 1 or " + std::to_string(K) + " values");
      else
        field = lst;
    } else {
      field.assign(K, power ? parse_power(v, key, err) : parse_number(v, key, err));
    }
    kv.erase(key);
  };

  auto take = [&kv](const std::string& key, std::string* out) {
    auto it = kv.find(key);
    if (it == kv.end()) return false;
    *out = it->second;
    kv.erase(it);
    return true;
  };

  std::string v;
  kv.erase("n_receivers");
  kv.erase("n_subcarriers");
  if (take("bandwidth_hz", &v)) c.bandwidth_hz = parse_number(v, "bandwidth_hz", err);
  if (c.n_subcarriers >= 1) c.subcarrier_bw_hz = c.bandwidth_hz / c.n_subcarriers;
  if (take("subcarrier_bw_hz", &v)) c.subcarrier_bw_hz = parse_number(v, "subcarrier_bw_hz", err);
  if (take("carrier_hz", &v)) c.carrier_hz = parse_number(v, "carrier_hz", err);
  if (take("sigma_ant", &v)) c.sigma_ant_w = parse_power(v, "sigma_ant", err);
  if (take("sigma_proc", &v)) c.sigma_proc_w = parse_power(v, "sigma_proc", err);
  if (take("sigma_int", &v)) c.sigma_int_w = parse_power(v, "sigma_int", err);
  if (take("eps_pa", &v)) c.eps_pa = parse_number(v, "eps_pa", err);
  if (take("p_max", &v)) c.p_max_w = parse_power(v, "p_max", err);
  if (take("p_pg", &v)) c.p_pg_w = parse_power(v, "p_pg", err);
  if (take("p_ct", &v)) c.p_ct_w = parse_power(v, "p_ct", err);
  if (take("p_cr", &v)) c.p_cr_w = parse_power(v, "p_cr", err);
  scalar_per_receiver("eta", c.eta, false);
  scalar_per_receiver("alpha", c.alpha, false);
  scalar_per_receiver("r_min_k_bps", c.r_min_k_bps, false);
  scalar_per_receiver("p_req", c.p_req_w, true);
  scalar_per_receiver("los_gain", c.los_gain, false);
  if (take("r_min_bps", &v)) c.r_min_bps = parse_number(v, "r_min_bps", err);
  if (take("delay_set", &v)) {
    c.delay_set.clear();
    for (double d : parse_list(v, "delay_set", err)) c.delay_set.push_back(static_cast<int>(d));
  }
  if (take("rho_e_min", &v)) c.rho_e_min = parse_number(v, "rho_e_min", err);
  if (take("rho_e_max", &v)) c.rho_e_max = parse_number(v, "rho_e_max", err);
  if (take("rho_i_min", &v)) c.rho_i_min = parse_number(v, "rho_i_min", err);
  if (take("rho_i_max", &v)) c.rho_i_max = parse_number(v, "rho_i_max", err);
  if (take("modes_e", &v)) c.modes_e = parse_list(v, "modes_e", err);
  if (take("modes_i", &v)) c.modes_i = parse_list(v, "modes_i", err);
  if (take("rician_k_db", &v)) c.rician_k_db = parse_number(v, "rician_k_db", err);
  if (take("antenna_gain_db", &v)) c.antenna_gain_db = parse_number(v, "antenna_gain_db", err);
  if (take("d_min_m", &v)) c.d_min_m = parse_number(v, "d_min_m", err);
  if (take("d_max_m", &v)) c.d_max_m = parse_number(v, "d_max_m", err);
  if (take("pl_break_m", &v)) c.pl_break_m = parse_number(v, "pl_break_m", err);
  if (take("pl_exp_near", &v)) c.pl_exp_near = parse_number(v, "pl_exp_near", err);
  if (take("pl_exp_far", &v)) c.pl_exp_far = parse_number(v, "pl_exp_far", err);
  if (take("dinkelbach_tol", &v)) c.dinkelbach.tol = parse_number(v, "dinkelbach_tol", err);
  if (take("dinkelbach_max_iterations", &v))
    c.dinkelbach.max_iterations = static_cast<int>(parse_number(v, "dinkelbach_max_iterations", err));
  if (take("dual_tol", &v)) c.dual.tol = parse_number(v, "dual_tol", err);
  if (take("dual_max_iterations", &v))
    c.dual.max_iterations = static_cast<int>(parse_number(v, "dual_max_iterations", err));
  if (take("seed", &v)) c.seed = static_cast<uint64_t>(parse_number(v, "seed", err));

  for (const auto& [key, unused] : kv) err.push_back("unknown key '" + key + "'");

  std::vector<std::string> verr = validate(c);
  err.insert(err.end(), verr.begin(), verr.end());
  if (!err.empty()) throw ConfigError{err};
  return c;
}

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError{{"cannot open config file: " + path}};
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace swipt
