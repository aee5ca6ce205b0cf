#pragma once

#include <cstddef>
#include <functional>

#include "covjam/detection.hpp"
#include "covjam/outage.hpp"

namespace covjam {

struct OptimizationResult {
  double tau_star = 0.0;
  double rate_star = 0.0;
  double omega_star = 0.0;
  double xi_bar_at_tau_star = 0.0;
  bool feasible = false;
};

/// |xi_bar*(tau*) - (1 - eps)| target of the threshold search.
inline constexpr double kConstraintTol = 1e-8;
/// Doublings of the tau bracket before the search gives up.
inline constexpr int kMaxTauDoublings = 60;

/// Smallest tau whose minimum average detection error reaches 1 - epsilon.
/// xi_bar*(tau) is nondecreasing, so the constraint is active at the optimum.
/// Throws Infeasible when even the all-jammers limit stays below 1 - epsilon.
/// The tau stored in ctx is ignored.
double optimal_tau(const DetectionContext& ctx, double epsilon, WardenCsi csi = WardenCsi::Case2);

struct RateOptimum {
  double rate_star = 0.0;
  double omega_star = 0.0;
};

/// Smallest rate at which the outage probability reaches 1 - 1e-6.
double rate_ceiling(const OutageContext& ctx, double tau);

/// Maximizes R (1 - delta(R)) over (0, rate_ceiling]: 32-point log scan, then
/// golden-section refinement around the best point.
RateOptimum optimal_rate(const OutageContext& ctx, double tau);

/// optimal_tau followed by optimal_rate at tau*. The detection error does not
/// depend on R, so solving the two stages in sequence is exact.
OptimizationResult maximize_throughput(const DetectionContext& detection, const OutageContext& outage,
                                       double epsilon, WardenCsi csi = WardenCsi::Case2);
/// Same, but reports infeasibility through OptimizationResult::feasible.
OptimizationResult try_maximize_throughput(const DetectionContext& detection, const OutageContext& outage,
                                           double epsilon, WardenCsi csi = WardenCsi::Case2);

/// Layout generator for a given helper count; nested layouts keep N_min meaningful.
using ScenarioGenerator = std::function<NetworkGeometry(std::size_t)>;

/// Smallest N in [0, n_max] for which the covertness constraint can be met with
/// jamming power pj_w (overrides params.pj_w). Throws Infeasible if none.
std::size_t min_helpers(const ScenarioGenerator& scenario, const SystemParams& params, double epsilon,
                        double pj_w, std::size_t n_max, WardenCsi csi = WardenCsi::Case2);

}  // namespace covjam
