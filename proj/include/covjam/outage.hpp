#pragma once

#include <vector>

#include "covjam/geometry.hpp"

namespace covjam {

/// Receiver-side constants of one layout. tau and R are passed per call, so a
/// context serves a whole (tau, R) sweep.
class OutageContext {
 public:
  OutageContext(const NetworkGeometry& geometry, const SystemParams& params);

  const NetworkGeometry& geometry() const { return geometry_; }
  const SystemParams& params() const { return params_; }
  double gain_tr() const { return gain_tr_; }
  /// d_{j_k,r}^-alpha per helper.
  const std::vector<double>& jam_gains_r() const { return jam_gains_r_; }

  /// (2^R - 1) / P_t
  double varphi_of(double rate) const;
  /// exp(-d_tr^alpha varphi sigma_r^2): probability of no outage without jammers.
  double lambda_of(double rate) const;

 private:
  NetworkGeometry geometry_;
  SystemParams params_;
  double gain_tr_ = 0.0;
  std::vector<double> jam_gains_r_;
};

enum class OutageRoute {
  Factorized,  // 1 - lambda prod_k [(1 - p_k) + p_k F_k]
  Enumerated,  // explicit sum over all 2^N subsets
};

/// Outage probability P[log2(1 + SINR) < R] with jammers selected at threshold tau.
double outage_probability(const OutageContext& ctx, double rate, double tau,
                          OutageRoute route = OutageRoute::Factorized);

/// Every helper jamming: 1 - lambda prod_k 1 / (varphi P_j d_jr^-alpha d_tr^alpha + 1).
double outage_limit_tau_inf(const OutageContext& ctx, double rate);

struct ThroughputReport {
  double delta = 0.0;
  double omega = 0.0;  // R (1 - delta)
  double tau_used = 0.0;
  double rate_used = 0.0;
};

ThroughputReport covert_throughput(const OutageContext& ctx, double rate, double tau);

}  // namespace covjam
