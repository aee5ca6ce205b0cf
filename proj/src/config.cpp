#include "covjam/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "covjam/errors.hpp"
#include "covjam/subsets.hpp"

namespace covjam {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(key, "expected a finite number, got '" + v + "'");
  return x;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_string(WardenCsi csi) { return csi == WardenCsi::Case1 ? "case1" : "case2"; }

void ExperimentConfig::validate() const {
  require(n_helpers <= kMaxHelpers, "n_helpers", "must be <= 20");
  require(d0_m > 0.0, "d0_m", "must be > 0");
  require(d_tr_factor > 0.0, "d_tr_factor", "must be > 0");
  require(d_tw_factor > 0.0, "d_tw_factor", "must be > 0");
  require(std::isfinite(theta_w_rad), "theta_w_rad", "must be finite");
  require(alpha > 0.0, "alpha", "must be > 0");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon", "must be in (0, 1)");
  require(rate_bits >= 0.0, "rate_bits", "must be >= 0");
  require(lg_tau_lo < lg_tau_hi, "lg_tau_lo", "must be < lg_tau_hi");
  require(lg_tau_points >= 2, "lg_tau_points", "must be >= 2");
  require(sweep_lo < sweep_hi, "sweep_lo", "must be < sweep_hi");
  require(sweep_points >= 2, "sweep_points", "must be >= 2");
  require(mc_trials >= 1, "mc_trials", "must be >= 1");
  require(!n_channel_uses || *n_channel_uses >= 1, "n_channel_uses", "must be >= 1 or asymptotic");
  require(n_max <= kMaxHelpers, "n_max", "must be <= 20");
}

NetworkGeometry ExperimentConfig::to_geometry() const {
  return generate_geometry(seed, n_helpers, d_tr_factor * d0_m, d_tw_factor * d0_m, theta_w_rad, alpha);
}

SystemParams ExperimentConfig::to_params() const {
  SystemParams p;
  p.pt_w = dbm_to_watts(pt_dbm);
  p.pj_w = dbm_to_watts(pj_dbm);
  p.sigma_r2_w = dbm_to_watts(sigma_r2_dbm);
  p.sigma_w2_w = dbm_to_watts(sigma_w2_dbm);
  p.tau = tau();
  p.rate_r = rate_bits;
  p.epsilon = epsilon;
  return p;
}

McConfig ExperimentConfig::to_mc() const { return {seed, mc_trials, n_channel_uses}; }

double ExperimentConfig::tau() const { return std::pow(10.0, lg_tau); }

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "seed") seed = parse_uint(key, v);
  else if (key == "n_helpers") n_helpers = parse_uint(key, v);
  else if (key == "d0_m") d0_m = parse_double(key, v);
  else if (key == "d_tr_factor") d_tr_factor = parse_double(key, v);
  else if (key == "d_tw_factor") d_tw_factor = parse_double(key, v);
  else if (key == "theta_w_rad") theta_w_rad = parse_double(key, v);
  else if (key == "alpha") alpha = parse_double(key, v);
  else if (key == "pt_dbm") pt_dbm = parse_double(key, v);
  else if (key == "pj_dbm") pj_dbm = parse_double(key, v);
  else if (key == "sigma_r2_dbm") sigma_r2_dbm = parse_double(key, v);
  else if (key == "sigma_w2_dbm") sigma_w2_dbm = parse_double(key, v);
  else if (key == "epsilon") epsilon = parse_double(key, v);
  else if (key == "rate_bits") rate_bits = parse_double(key, v);
  else if (key == "lg_tau") lg_tau = parse_double(key, v);
  else if (key == "lg_tau_lo") lg_tau_lo = parse_double(key, v);
  else if (key == "lg_tau_hi") lg_tau_hi = parse_double(key, v);
  else if (key == "lg_tau_points") lg_tau_points = parse_uint(key, v);
  else if (key == "sweep_lo") sweep_lo = parse_double(key, v);
  else if (key == "sweep_hi") sweep_hi = parse_double(key, v);
  else if (key == "sweep_points") sweep_points = parse_uint(key, v);
  else if (key == "mu_dbm") mu_dbm = (v == "auto") ? std::nullopt : std::optional(parse_double(key, v));
  else if (key == "mc_trials") mc_trials = parse_uint(key, v);
  else if (key == "mc") mc = parse_bool(key, v);
  else if (key == "n_channel_uses")
    n_channel_uses = (v == "asymptotic") ? std::nullopt : std::optional<std::size_t>(parse_uint(key, v));
  else if (key == "warden_csi_case") {
    if (v == "case1") warden_csi_case = WardenCsi::Case1;
    else if (v == "case2") warden_csi_case = WardenCsi::Case2;
    else throw ConfigError(key, "expected case1 or case2, got '" + v + "'");
  } else if (key == "n_max") n_max = parse_uint(key, v);
  else throw ConfigError(key, "unknown key");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  const auto u = [](std::uint64_t x) { return std::to_string(x); };
  return {
      {"seed", u(seed)},
      {"n_helpers", u(n_helpers)},
      {"d0_m", format_number(d0_m)},
      {"d_tr_factor", format_number(d_tr_factor)},
      {"d_tw_factor", format_number(d_tw_factor)},
      {"theta_w_rad", format_number(theta_w_rad)},
      {"alpha", format_number(alpha)},
      {"pt_dbm", format_number(pt_dbm)},
      {"pj_dbm", format_number(pj_dbm)},
      {"sigma_r2_dbm", format_number(sigma_r2_dbm)},
      {"sigma_w2_dbm", format_number(sigma_w2_dbm)},
      {"epsilon", format_number(epsilon)},
      {"rate_bits", format_number(rate_bits)},
      {"lg_tau", format_number(lg_tau)},
      {"lg_tau_lo", format_number(lg_tau_lo)},
      {"lg_tau_hi", format_number(lg_tau_hi)},
      {"lg_tau_points", u(lg_tau_points)},
      {"sweep_lo", format_number(sweep_lo)},
      {"sweep_hi", format_number(sweep_hi)},
      {"sweep_points", u(sweep_points)},
      {"mu_dbm", mu_dbm ? format_number(*mu_dbm) : "auto"},
      {"mc_trials", u(mc_trials)},
      {"mc", mc ? "true" : "false"},
      {"n_channel_uses", n_channel_uses ? u(*n_channel_uses) : "asymptotic"},
      {"warden_csi_case", to_string(warden_csi_case)},
      {"n_max", u(n_max)},
  };
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
  return out;
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

}  // namespace covjam
