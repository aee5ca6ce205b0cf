#include "covjam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "covjam/errors.hpp"
#include "covjam/numerics.hpp"

namespace covjam {

double optimal_tau(const DetectionContext& ctx, double epsilon, WardenCsi csi) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("optimal_tau: epsilon must be in (0,1)");
  const double target = 1.0 - epsilon;

  std::map<double, double> memo;
  std::optional<double> last_mu;
  auto xi_at = [&](double tau) {
    if (auto it = memo.find(tau); it != memo.end()) return it->second;
    double v;
    if (csi == WardenCsi::Case2) {
      const auto m = min_avg_error_case2(ctx.with_tau(tau));
      v = m.xi_bar;
      last_mu = m.mu_star;
    } else {
      v = min_avg_error_case1(ctx.with_tau(tau));
    }
    memo.emplace(tau, v);
    return v;
  };

  const auto& geometry = ctx.geometry();
  if (xi_at(0.0) >= target) return 0.0;
  if (geometry.helper_count() == 0)
    throw Infeasible("no helpers: minimum detection error " + std::to_string(xi_at(0.0)) + " < " + std::to_string(target));

  const double limit =
      min_avg_error(ctx.with_selection_probs(std::vector<double>(geometry.helper_count(), 1.0)), csi);
  if (limit < target)
    throw Infeasible("all-jammers limit of the minimum detection error is " + std::to_string(limit) + " < " +
                     std::to_string(target));

  double d_max = 0.0;
  for (std::size_t k = 0; k < geometry.helper_count(); ++k) d_max = std::max(d_max, geometry.d_jr(k));
  const double tau_lo = 1e-6 / (std::pow(d_max, geometry.alpha) * ctx.params().sigma_r2_w);

  const numerics::ToleranceSpec tol{kConstraintTol, 1e-14, 200};
  // xi at any single mu bounds both minima from above, so a bound clearly under the
  // target settles the sign without the full mu search; the bisection path is unchanged
  auto gap = [&](double tau) {
    if (last_mu && !memo.contains(tau)) {
      const double bound = avg_detection_error(ctx.with_tau(tau), *last_mu, AverageRoute::ClosedForm) - target;
      if (bound < -2.0 * kConstraintTol) return bound;
    }
    return xi_at(tau) - target;
  };
  if (gap(tau_lo) >= 0.0) return numerics::bisect_root(gap, 0.0, tau_lo, tol);

  double hi = tau_lo;
  for (int i = 0; i < kMaxTauDoublings; ++i) {
    const double lo = hi;
    hi *= 2.0;
    if (gap(hi) >= 0.0) return numerics::bisect_root(gap, lo, hi, tol);
  }
  throw Infeasible("threshold search did not reach the covertness target within " +
                   std::to_string(kMaxTauDoublings) + " doublings");
}

double rate_ceiling(const OutageContext& ctx, double tau) {
  const double target = 1.0 - 1e-6;
  auto gap = [&](double r) { return outage_probability(ctx, r, tau) - target; };
  double lo = 0.0;
  double hi = 1.0;
  while (gap(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 512.0) throw BudgetExceeded("rate_ceiling: outage never saturates");
  }
  return numerics::bisect_root(gap, lo, hi, {1e-12, 1e-12, 200});
}

RateOptimum optimal_rate(const OutageContext& ctx, double tau) {
  if (!(tau >= 0.0)) throw DomainError("optimal_rate: tau must be >= 0");
  const double r_hi = rate_ceiling(ctx, tau);
  const auto grid = numerics::log_space(r_hi * 1e-4, r_hi, 32);
  const auto best = numerics::scan_then_refine([&](double r) { return -covert_throughput(ctx, r, tau).omega; }, grid,
                                               0.0, {r_hi * 1e-13, 1e-12, 300});
  return {best.argmin, -best.value};
}

OptimizationResult maximize_throughput(const DetectionContext& detection, const OutageContext& outage,
                                       double epsilon, WardenCsi csi) {
  OptimizationResult out;
  out.tau_star = optimal_tau(detection, epsilon, csi);
  out.xi_bar_at_tau_star = min_avg_error(detection.with_tau(out.tau_star), csi);
  const auto rate = optimal_rate(outage, out.tau_star);
  out.rate_star = rate.rate_star;
  out.omega_star = covert_throughput(outage, rate.rate_star, out.tau_star).omega;
  out.feasible = true;
  return out;
}

OptimizationResult try_maximize_throughput(const DetectionContext& detection, const OutageContext& outage,
                                           double epsilon, WardenCsi csi) {
  try {
    return maximize_throughput(detection, outage, epsilon, csi);
  } catch (const Infeasible&) {
    return OptimizationResult{};
  }
}

std::size_t min_helpers(const ScenarioGenerator& scenario, const SystemParams& params, double epsilon, double pj_w,
                        std::size_t n_max, WardenCsi csi) {
  if (n_max > kMaxHelpers) throw CapacityExceeded("min_helpers: n_max exceeds " + std::to_string(kMaxHelpers));
  SystemParams p = params;
  p.pj_w = pj_w;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const DetectionContext ctx(scenario(n), p);
    try {
      optimal_tau(ctx, epsilon, csi);
      return n;
    } catch (const Infeasible&) {
    }
  }
  throw Infeasible("covertness target unreachable with up to " + std::to_string(n_max) + " helpers");
}

}  // namespace covjam
