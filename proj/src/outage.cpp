#include "covjam/outage.hpp"

#include <cmath>
#include <numbers>

#include "covjam/errors.hpp"
#include "covjam/subsets.hpp"

namespace covjam {
namespace {

void check_rate_tau(double rate, double tau) {
  if (!(rate >= 0.0)) throw DomainError("outage: rate must be >= 0");
  if (!(tau >= 0.0)) throw DomainError("outage: tau must be >= 0");
}

}  // namespace

OutageContext::OutageContext(const NetworkGeometry& geometry, const SystemParams& params)
    : geometry_(geometry), params_(params) {
  geometry_.validate();
  params_.validate();
  gain_tr_ = path_gain(geometry_.d_tr(), geometry_.alpha);
  jam_gains_r_ = receiver_gains(geometry_);
}

double OutageContext::varphi_of(double rate) const { return std::expm1(rate * std::numbers::ln2) / params_.pt_w; }

double OutageContext::lambda_of(double rate) const {
  return std::exp(-varphi_of(rate) * params_.sigma_r2_w / gain_tr_);
}

double outage_probability(const OutageContext& ctx, double rate, double tau, OutageRoute route) {
  check_rate_tau(rate, tau);
  const double lambda = ctx.lambda_of(rate);
  const double varphi = ctx.varphi_of(rate);
  const double pj = ctx.params().pj_w;
  const double sigma_r2 = ctx.params().sigma_r2_w;
  const auto& gains = ctx.jam_gains_r();
  if (tau == 0.0) return -std::expm1(-varphi * sigma_r2 / ctx.gain_tr());

  if (route == OutageRoute::Factorized) {
    // E over helper k of exp(-a_k |h|^2) restricted to the selection event, plus
    // the silent branch: e^-c + (1 - e^-(1+a)c) / (1 + a)
    double product = 1.0;
    for (double g : gains) {
      const double a = varphi * pj * g / ctx.gain_tr();
      const double c = sigma_r2 * tau / g;
      product *= std::exp(-c) - std::expm1(-(1.0 + a) * c) / (1.0 + a);
    }
    return 1.0 - lambda * product;
  }

  // Enumerated: the conditional factor per selected helper,
  // (1 - e^-(1+a)c) / ((1 + a)(1 - e^-c)), then sum over subsets.
  const std::size_t n = gains.size();
  std::vector<double> factor(n), p(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = varphi * pj * gains[k] / ctx.gain_tr();
    const double c = sigma_r2 * tau / gains[k];
    factor[k] = std::expm1(-(1.0 + a) * c) / ((1.0 + a) * std::expm1(-c));
    p[k] = -std::expm1(-c);
  }
  const auto probs = subset_probabilities(p);
  double delta = (1.0 - lambda) * probs[0];
  for (std::size_t mask = 1; mask < probs.size(); ++mask) {
    double prod = 1.0;
    for (std::size_t k = 0; k < n; ++k)
      if ((mask >> k) & 1u) prod *= factor[k];
    delta += probs[mask] * (1.0 - lambda * prod);
  }
  return delta;
}

double outage_limit_tau_inf(const OutageContext& ctx, double rate) {
  check_rate_tau(rate, 0.0);
  const double varphi = ctx.varphi_of(rate);
  double product = 1.0;
  for (double g : ctx.jam_gains_r()) product /= varphi * ctx.params().pj_w * g / ctx.gain_tr() + 1.0;
  return 1.0 - ctx.lambda_of(rate) * product;
}

ThroughputReport covert_throughput(const OutageContext& ctx, double rate, double tau) {
  ThroughputReport r;
  r.delta = outage_probability(ctx, rate, tau);
  r.omega = rate * (1.0 - r.delta);
  r.tau_used = tau;
  r.rate_used = rate;
  return r;
}

}  // namespace covjam
