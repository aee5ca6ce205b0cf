#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "covjam/geometry.hpp"

namespace covjam {

struct McConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 1'000'000;
  /// Radiometer window n; empty means the n -> infinity statistic.
  std::optional<std::size_t> n_channel_uses;

  void validate() const;
};

struct McEstimate {
  double value = 0.0;
  double std_err = 0.0;
};

/// sqrt(v (1 - v) / trials) for an indicator average from `hits` successes.
McEstimate indicator_estimate(std::uint64_t hits, std::size_t trials);

struct DetectionEstimate {
  McEstimate p_fa;
  McEstimate p_md;
  McEstimate xi_bar;
};

/// Trials per independently seeded block. Block b always draws from the same
/// sub-stream, so estimates do not depend on the worker count.
inline constexpr std::size_t kMcBlockTrials = std::size_t{1} << 14;

/// Radiometer error rates at threshold mu, averaged over all fadings including
/// h_tw. H0 and H1 share every draw of a trial, so each trial contributes at
/// most one error and xi_bar is itself an indicator average.
DetectionEstimate simulate_detection(const NetworkGeometry& geometry, const SystemParams& params, double mu,
                                     const McConfig& cfg);

/// Fraction of trials with log2(1 + SINR) < rate at receiver R.
McEstimate simulate_outage(const NetworkGeometry& geometry, const SystemParams& params, double rate,
                           const McConfig& cfg);

/// Kolmogorov-Smirnov distance between samples of sum_{q in subset} |h_q|^2 d_{q,w}^-alpha
/// and its fitted gamma CDF. subset is a helper bit-set and must be non-empty.
double empirical_subset_power_ks(const NetworkGeometry& geometry, std::uint32_t subset, std::size_t trials,
                                 std::uint64_t seed);

struct ConvergenceRow {
  std::optional<std::size_t> n_channel_uses;  // empty: asymptotic
  McEstimate xi_hat;
};

inline constexpr std::size_t kConvergenceTrials = 20'000;

/// xi_bar estimates for n in {10, 100, 1000, 10000} and the asymptotic statistic,
/// all from the same fading draws.
std::vector<ConvergenceRow> finite_n_convergence(const NetworkGeometry& geometry, const SystemParams& params,
                                                 double mu, std::uint64_t seed,
                                                 std::size_t trials = kConvergenceTrials);

}  // namespace covjam
