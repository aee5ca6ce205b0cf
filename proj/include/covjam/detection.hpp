#pragma once

#include <optional>
#include <span>
#include <vector>

#include "covjam/geometry.hpp"
#include "covjam/subsets.hpp"

namespace covjam {

/// Warden knowledge of the detection channel h_{t,w}.
enum class WardenCsi {
  Case1,  // W knows h_{t,w} and adapts mu to it
  Case2,  // W only knows its statistics (default)
};

/// The 1 - 1e-6 quantile of Exp(1); sets the upper end of every mu search.
inline constexpr double kExpQuantile = 13.8155;
/// Truncation of the outer E_{h_tw} integral; the Exp(1) tail beyond is < 1e-16.
inline constexpr double kDetectionChannelCutoff = 36.8;
/// Total probability of the least likely subsets dropped from the warden-side
/// sums; every error probability moves by at most twice this.
inline constexpr double kNegligibleSubsetMass = 1e-12;

/// Warden-side view of one subset with P_j folded into the scale.
struct ActiveSubset {
  double probability;
  double shape_v;
  double lgamma_v;
  double scale_pj;      // omega * P_j
  double inv_scale_pj;  // 1 / (omega * P_j)
};

class DetectionContext {
 public:
  /// Enumerates subsets at params.tau.
  DetectionContext(const NetworkGeometry& geometry, const SystemParams& params);
  DetectionContext(const NetworkGeometry& geometry, const SystemParams& params, SubsetEnsemble ensemble);

  /// Same geometry and gamma fits, probabilities recomputed at another tau.
  DetectionContext with_tau(double tau) const;
  /// Same geometry and gamma fits with explicit per-helper selection probabilities
  /// (all ones gives the tau -> infinity configuration).
  DetectionContext with_selection_probs(std::vector<double> probs) const;

  const NetworkGeometry& geometry() const { return geometry_; }
  const SystemParams& params() const { return params_; }
  const SubsetEnsemble& ensemble() const { return ensemble_; }
  std::span<const ActiveSubset> active() const { return active_; }
  double empty_probability() const { return ensemble_.empty_probability(); }

  double gain_tw() const { return gain_tw_; }
  /// P_t d_tw^-alpha: the covert signal power per unit |h_tw|^2.
  double signal_scale() const { return params_.pt_w * gain_tw_; }
  /// P_j sum_k d_{j_k,w}^-alpha.
  double jamming_scale() const { return jamming_scale_; }

  double sigma_c2_of(double h2) const { return signal_scale() * h2; }
  double rho1_of(double h2) const { return sigma_c2_of(h2) + params_.sigma_w2_w; }
  double rho2_of(double mu) const { return (mu - params_.sigma_w2_w) / signal_scale(); }
  /// sigma_w^2 + (P_t d_tw^-alpha + P_j sum g) * kExpQuantile.
  double mu_upper() const;

 private:
  void build_active();

  NetworkGeometry geometry_;
  SystemParams params_;
  SubsetEnsemble ensemble_;
  double gain_tw_ = 0.0;
  double jamming_scale_ = 0.0;
  std::vector<ActiveSubset> active_;
};

struct DetectionReport {
  double p_fa = 0.0;
  double p_md = 0.0;
  double xi = 0.0;
  std::optional<double> mu_star;
};

/// How the E_{h_tw} average of the miss-detection term is evaluated.
enum class AverageRoute {
  Quadrature,  // P_FA + integral of e^-x P_MD(mu, x) over [0, rho2]
  PerSubset,   // per-subset form: sum P (Q - integral e^-x Q) + 1 - e^-rho2
  ClosedForm,  // per-subset integral solved by parts; no quadrature
};

/// Range of mu (above the branch point) avoided by log grids. Searches start at
/// this fraction of their span.
inline constexpr double kMuGridFloor = 1e-12;

double false_alarm_rate(const DetectionContext& ctx, double mu);
double miss_detection_rate(const DetectionContext& ctx, double mu, double h2);
DetectionReport detection_error(const DetectionContext& ctx, double mu, double h2);

/// tau -> infinity form: a single gamma law over all N helpers. Throws DomainError for N = 0.
double detection_error_limit_tau_inf(const DetectionContext& ctx, double mu, double h2);

/// Average over |h_tw|^2 ~ Exp(1) of the detection error at threshold mu.
double avg_detection_error(const DetectionContext& ctx, double mu, AverageRoute route = AverageRoute::Quadrature);
double avg_detection_error_limit_tau_inf(const DetectionContext& ctx, double mu);

/// min over mu >= rho1(h2) of xi; mu_star is set.
DetectionReport min_detection_error(const DetectionContext& ctx, double h2);

struct AverageMinimum {
  double xi_bar = 0.0;
  double mu_star = 0.0;  // case 2 only
};

/// E_{h_tw}[min_mu xi]: W tracks h_tw.
double min_avg_error_case1(const DetectionContext& ctx);
/// min_mu E_{h_tw}[xi]: W knows only the statistics of h_tw.
AverageMinimum min_avg_error_case2(const DetectionContext& ctx, AverageRoute route = AverageRoute::ClosedForm);
double min_avg_error(const DetectionContext& ctx, WardenCsi csi);

}  // namespace covjam
