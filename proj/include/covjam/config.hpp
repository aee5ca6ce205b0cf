#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covjam/detection.hpp"
#include "covjam/geometry.hpp"
#include "covjam/montecarlo.hpp"

namespace covjam {

/// Resolved experiment configuration. Distances are multiples of d0_m, powers
/// are in dBm; to_geometry / to_params convert to linear units.
struct ExperimentConfig {
  /// Seeds the helper layout and every Monte Carlo stream.
  std::uint64_t seed = 136;
  std::size_t n_helpers = 10;
  double d0_m = 1000.0;
  double d_tr_factor = 1.0;
  double d_tw_factor = 1.2;
  double theta_w_rad = 1.5707963267948966;
  double alpha = 4.0;
  double pt_dbm = 10.0;
  double pj_dbm = 10.0;
  double sigma_r2_dbm = -120.0;
  double sigma_w2_dbm = -120.0;
  double epsilon = 0.1;
  double rate_bits = 1.0;
  double lg_tau = 1.0;
  double lg_tau_lo = -1.0;
  double lg_tau_hi = 4.0;
  std::size_t lg_tau_points = 20;
  // Grid of every sweep variable other than lg_tau.
  double sweep_lo = 0.0;
  double sweep_hi = 20.0;
  std::size_t sweep_points = 11;
  /// Radiometer threshold in dBm; empty selects the case-2 optimum.
  std::optional<double> mu_dbm;
  std::size_t mc_trials = 1'000'000;
  bool mc = false;
  std::optional<std::size_t> n_channel_uses;  // empty: asymptotic
  WardenCsi warden_csi_case = WardenCsi::Case2;
  std::size_t n_max = 20;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  NetworkGeometry to_geometry() const;
  SystemParams to_params() const;
  McConfig to_mc() const;
  double tau() const;

  /// Applies one key = value assignment. Throws ConfigError for an unknown key
  /// or a malformed value.
  void set(const std::string& key, const std::string& value);
  /// Every key with its current value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  /// Flat key = value text that parse_config reads back to an equal config.
  std::string to_text() const;
};

/// Parses one key = value per line; '#' starts a comment. Keys not present keep
/// their defaults.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Shortest decimal text that parses back to the same double.
std::string format_number(double x);

std::string to_string(WardenCsi csi);

}  // namespace covjam
