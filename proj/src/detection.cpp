#include "covjam/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covjam/errors.hpp"
#include "covjam/numerics.hpp"
#include "covjam/parallel.hpp"

namespace covjam {

using numerics::reg_gamma_lower;
using numerics::reg_gamma_upper;

DetectionContext::DetectionContext(const NetworkGeometry& geometry, const SystemParams& params)
    : DetectionContext(geometry, params, enumerate_subsets(geometry, params)) {}

DetectionContext::DetectionContext(const NetworkGeometry& geometry, const SystemParams& params,
                                   SubsetEnsemble ensemble)
    : geometry_(geometry), params_(params), ensemble_(std::move(ensemble)) {
  geometry_.validate();
  params_.validate();
  if (ensemble_.helper_count() != geometry_.helper_count())
    throw DomainError("DetectionContext: ensemble does not match geometry");
  gain_tw_ = path_gain(geometry_.d_tw(), geometry_.alpha);
  double sum = 0.0;
  for (double g : ensemble_.fits().gains()) sum += g;
  jamming_scale_ = params_.pj_w * sum;
  build_active();
}

DetectionContext DetectionContext::with_tau(double tau) const {
  SystemParams p = params_;
  p.tau = tau;
  return DetectionContext(geometry_, p, SubsetEnsemble(ensemble_.shared_fits(), selection_probabilities(geometry_, p)));
}

DetectionContext DetectionContext::with_selection_probs(std::vector<double> probs) const {
  return DetectionContext(geometry_, params_, SubsetEnsemble(ensemble_.shared_fits(), std::move(probs)));
}

double DetectionContext::mu_upper() const {
  return params_.sigma_w2_w + (signal_scale() + jamming_scale_) * kExpQuantile;
}

void DetectionContext::build_active() {
  active_.clear();
  const auto probs = ensemble_.probabilities();
  const auto& fits = ensemble_.fits();
  // drop the least likely subsets, smallest first, while their total stays within budget
  std::vector<std::uint32_t> order(probs.size() - 1);
  for (std::uint32_t mask = 1; mask < probs.size(); ++mask) order[mask - 1] = mask;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return probs[a] != probs[b] ? probs[a] < probs[b] : a < b;
  });
  std::vector<char> keep(probs.size(), 1);
  double dropped = 0.0;
  for (std::uint32_t mask : order) {
    if (dropped + probs[mask] > kNegligibleSubsetMass) break;
    dropped += probs[mask];
    keep[mask] = 0;
  }
  for (std::uint32_t mask = 1; mask < probs.size(); ++mask) {
    if (!keep[mask]) continue;
    const auto& fit = fits[mask];
    const double scale_pj = fit.scale_w * params_.pj_w;
    active_.push_back({probs[mask], fit.shape_v, fit.lgamma_v, scale_pj, 1.0 / scale_pj});
  }
}

namespace {

// All kernels below take the excess of mu over a branch point so that the
// small differences near sigma_w^2 and rho1 are never formed by subtraction.

// P_FA for mu = sigma_w^2 + excess, excess > 0.
double fa_from_excess(const DetectionContext& ctx, double excess) {
  double sum = 0.0;
  for (const auto& s : ctx.active()) sum += s.probability * reg_gamma_upper(s.shape_v, excess * s.inv_scale_pj, s.lgamma_v);
  return sum;
}

// P_MD for mu = rho1 + excess, excess > 0.
double md_from_excess(const DetectionContext& ctx, double excess) {
  double sum = ctx.empty_probability();
  for (const auto& s : ctx.active()) sum += s.probability * reg_gamma_lower(s.shape_v, excess * s.inv_scale_pj, s.lgamma_v);
  return sum;
}

// xi for mu = rho1(h2) + excess with excess > 0 and rho1 - sigma_w^2 = sigma_c2.
double xi_above_rho1(const DetectionContext& ctx, double excess, double sigma_c2) {
  double sum = ctx.empty_probability();
  for (const auto& s : ctx.active()) {
    sum += s.probability * (reg_gamma_upper(s.shape_v, (excess + sigma_c2) * s.inv_scale_pj, s.lgamma_v) +
                            reg_gamma_lower(s.shape_v, excess * s.inv_scale_pj, s.lgamma_v));
  }
  return std::min(sum, 1.0);
}

double log_window_series(double v, double lgamma_v, double z, double log_base);

// e^-rho2 / Gamma(v) * integral_0^L g^{v-1} e^{-b g} dg.
//
// This is the per-subset probability P(J <= mu - sigma_w^2 < J + S) for the
// gamma-distributed jamming power J and the exponential signal power S, in
// units where J ~ Gamma(v, 1): it is what the E_x[P_MD] integral reduces to
// after one integration by parts.
double detection_window(double v, double lgamma_v, double b, double L, double rho2) {
  if (!(L > 0.0)) return 0.0;
  const double z = b * L;
  const double log_base = -rho2 + v * std::log(L) - lgamma_v;
  if (z > 1e-200) {
    if (z < v + 1.0) {
      // x^-v P(v, z) with the b^-v factor cancelled against z^v analytically
      double ap = v, del = 1.0 / v, sum = del;
      for (int n = 0; n < 100000; ++n) {
        ap += 1.0;
        del *= z / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
      }
      return std::exp(log_base - z + std::log(sum));
    }
    return std::exp(-rho2 - v * std::log(b)) * reg_gamma_lower(v, z, lgamma_v);
  }
  return std::exp(log_window_series(v, lgamma_v, -z > 0.0 ? -z : 0.0, log_base));
}

// log of exp(log_base) * sum_k z^k / (k! (v + k)), z >= 0, summed outward from the peak term.
double log_window_series(double v, double /*lgamma_v*/, double z, double log_base) {
  if (z == 0.0) return log_base - std::log(v);
  const double k0 = std::floor(z);
  const double log_peak = log_base + k0 * std::log(z) - std::lgamma(k0 + 1.0) - std::log(v + k0);
  double sum = 1.0;
  double term = 1.0;
  for (double k = k0;; k += 1.0) {
    term *= z * (v + k) / ((k + 1.0) * (v + k + 1.0));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  term = 1.0;
  for (double k = k0; k >= 1.0; k -= 1.0) {
    term *= k * (v + k) / (z * (v + k - 1.0));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return log_peak + std::log(sum);
}

// Closed-form E_x[xi] for mu = sigma_w^2 + excess, excess > 0:
// 1 - P_empty e^-rho2 - sum_phi P_phi * window_phi.
double avg_closed_from_excess(const DetectionContext& ctx, double excess) {
  const double s = ctx.signal_scale();
  const double rho2 = excess / s;
  double correct = ctx.empty_probability() * std::exp(-rho2);
  for (const auto& a : ctx.active()) {
    const double b = 1.0 - a.scale_pj / s;
    correct += a.probability * detection_window(a.shape_v, a.lgamma_v, b, excess * a.inv_scale_pj, rho2);
  }
  return std::clamp(1.0 - correct, 0.0, 1.0);
}

numerics::ToleranceSpec avg_quadrature_tol() { return {1e-11, 1e-12, 2000}; }

double avg_quadrature_from_excess(const DetectionContext& ctx, double excess) {
  const double s = ctx.signal_scale();
  const double rho2 = excess / s;
  const double upper = std::min(rho2, kDetectionChannelCutoff);
  const double md = numerics::integrate_adaptive(
      [&](double x) { return std::exp(-x) * md_from_excess(ctx, std::max(excess - s * x, 0.0)); }, 0.0, upper,
      avg_quadrature_tol());
  return fa_from_excess(ctx, excess) + md;
}

double avg_per_subset_from_excess(const DetectionContext& ctx, double excess) {
  const double s = ctx.signal_scale();
  const double rho2 = excess / s;
  const double upper = std::min(rho2, kDetectionChannelCutoff);
  double sum = -std::expm1(-rho2);
  for (const auto& a : ctx.active()) {
    const double tail = numerics::integrate_adaptive(
        [&](double x) {
          return std::exp(-x) * reg_gamma_upper(a.shape_v, std::max(excess - s * x, 0.0) * a.inv_scale_pj, a.lgamma_v);
        },
        0.0, upper, avg_quadrature_tol());
    sum += a.probability * (reg_gamma_upper(a.shape_v, excess * a.inv_scale_pj, a.lgamma_v) - tail);
  }
  return sum;
}

double avg_from_excess(const DetectionContext& ctx, double excess, AverageRoute route) {
  switch (route) {
    case AverageRoute::Quadrature: return avg_quadrature_from_excess(ctx, excess);
    case AverageRoute::PerSubset: return avg_per_subset_from_excess(ctx, excess);
    case AverageRoute::ClosedForm: return avg_closed_from_excess(ctx, excess);
  }
  return avg_closed_from_excess(ctx, excess);
}

void check_mu(double mu) {
  if (!(mu > 0.0)) throw DomainError("detection threshold mu must be > 0");
}

const GammaFits::Entry& all_helpers_fit(const DetectionContext& ctx) {
  if (ctx.geometry().helper_count() == 0) throw DomainError("tau -> infinity limit needs at least one helper");
  return ctx.ensemble().fits().full();
}

numerics::ToleranceSpec refine_tol(double span) { return {span * 1e-13, 1e-9, 200}; }

constexpr std::size_t kCase2Grid = 256;
constexpr std::size_t kCase1Grid = 64;

}  // namespace

double false_alarm_rate(const DetectionContext& ctx, double mu) {
  check_mu(mu);
  const double excess = mu - ctx.params().sigma_w2_w;
  if (excess <= 0.0) return 1.0;
  return fa_from_excess(ctx, excess);
}

double miss_detection_rate(const DetectionContext& ctx, double mu, double h2) {
  check_mu(mu);
  if (!(h2 >= 0.0)) throw DomainError("miss_detection_rate: h2 must be >= 0");
  const double excess = mu - ctx.rho1_of(h2);
  if (excess <= 0.0) return 0.0;
  return md_from_excess(ctx, excess);
}

DetectionReport detection_error(const DetectionContext& ctx, double mu, double h2) {
  DetectionReport r;
  r.p_fa = false_alarm_rate(ctx, mu);
  r.p_md = miss_detection_rate(ctx, mu, h2);
  r.xi = mu <= ctx.params().sigma_w2_w ? 1.0 : std::min(r.p_fa + r.p_md, 1.0);
  return r;
}

double detection_error_limit_tau_inf(const DetectionContext& ctx, double mu, double h2) {
  check_mu(mu);
  const auto& fit = all_helpers_fit(ctx);
  const double pj = ctx.params().pj_w;
  const double sigma_w2 = ctx.params().sigma_w2_w;
  if (mu <= sigma_w2) return 1.0;
  const double q_noise = reg_gamma_upper(fit.shape_v, (mu - sigma_w2) / (fit.scale_w * pj), fit.lgamma_v);
  const double rho1 = ctx.rho1_of(h2);
  if (mu <= rho1) return q_noise;
  const double q_signal = reg_gamma_upper(fit.shape_v, (mu - rho1) / (fit.scale_w * pj), fit.lgamma_v);
  return 1.0 - (q_signal - q_noise);
}

double avg_detection_error(const DetectionContext& ctx, double mu, AverageRoute route) {
  check_mu(mu);
  const double excess = mu - ctx.params().sigma_w2_w;
  if (excess <= 0.0) return 1.0;
  return avg_from_excess(ctx, excess, route);
}

double avg_detection_error_limit_tau_inf(const DetectionContext& ctx, double mu) {
  check_mu(mu);
  const auto& fit = all_helpers_fit(ctx);
  const double sigma_w2 = ctx.params().sigma_w2_w;
  if (mu <= sigma_w2) return 1.0;
  const double excess = mu - sigma_w2;
  const double s = ctx.signal_scale();
  const double inv = 1.0 / (fit.scale_w * ctx.params().pj_w);
  const double rho2 = excess / s;
  const double md = numerics::integrate_adaptive(
      [&](double x) { return std::exp(-x) * reg_gamma_lower(fit.shape_v, std::max(excess - s * x, 0.0) * inv, fit.lgamma_v); },
      0.0, std::min(rho2, kDetectionChannelCutoff), avg_quadrature_tol());
  return reg_gamma_upper(fit.shape_v, excess * inv, fit.lgamma_v) + md;
}

DetectionReport min_detection_error(const DetectionContext& ctx, double h2) {
  if (!(h2 >= 0.0)) throw DomainError("min_detection_error: h2 must be >= 0");
  const double sigma_c2 = ctx.sigma_c2_of(h2);
  const double rho1 = ctx.rho1_of(h2);

  DetectionReport best;
  // closed lower branch at mu = rho1: no miss detection (for h2 = 0 this is mu = sigma_w^2, xi = 1)
  if (sigma_c2 > 0.0) {
    best.p_fa = fa_from_excess(ctx, sigma_c2);
    best.p_md = 0.0;
    best.xi = best.p_fa;
  } else {
    best.p_fa = 1.0;
    best.xi = 1.0;
  }
  best.mu_star = rho1;
  if (best.xi == 0.0 || ctx.active().empty()) return best;

  const double span = (ctx.jamming_scale() + ctx.signal_scale()) * kExpQuantile;
  const auto grid = numerics::log_space(span * kMuGridFloor, span, kCase1Grid);
  const auto interior = numerics::scan_then_refine([&](double e) { return xi_above_rho1(ctx, e, sigma_c2); }, grid,
                                                   0.0, refine_tol(span));
  if (interior.value < best.xi) {
    best.p_fa = fa_from_excess(ctx, interior.argmin + sigma_c2);
    best.p_md = md_from_excess(ctx, interior.argmin);
    best.xi = interior.value;
    best.mu_star = rho1 + interior.argmin;
  }
  return best;
}

double min_avg_error_case1(const DetectionContext& ctx) {
  const numerics::ToleranceSpec tol{1e-8, 1e-10, 400};
  const double value = numerics::integrate_adaptive(
      numerics::BatchFunction([&](std::span<const double> xs, std::span<double> out) {
        parallel_for(xs.size(), [&](std::size_t i) { out[i] = std::exp(-xs[i]) * min_detection_error(ctx, xs[i]).xi; });
      }),
      0.0, kDetectionChannelCutoff, tol);
  return std::clamp(value, 0.0, 1.0);
}

AverageMinimum min_avg_error_case2(const DetectionContext& ctx, AverageRoute route) {
  const double span = ctx.mu_upper() - ctx.params().sigma_w2_w;
  const auto grid = numerics::log_space(span * kMuGridFloor, span, kCase2Grid);
  const auto best = numerics::scan_then_refine([&](double e) { return avg_from_excess(ctx, e, route); }, grid, 0.0,
                                               refine_tol(span));
  return {best.value, ctx.params().sigma_w2_w + best.argmin};
}

double min_avg_error(const DetectionContext& ctx, WardenCsi csi) {
  return csi == WardenCsi::Case1 ? min_avg_error_case1(ctx) : min_avg_error_case2(ctx).xi_bar;
}

}  // namespace covjam
