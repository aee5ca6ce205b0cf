#include "covjam/subsets.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "covjam/errors.hpp"

namespace covjam {
namespace {

void check_capacity(std::size_t n) {
  if (n > kMaxHelpers)
    throw CapacityExceeded("exact subset enumeration supports at most " + std::to_string(kMaxHelpers) +
                           " helpers, got " + std::to_string(n));
}

}  // namespace

GammaMoments gamma_moments(std::span<const double> member_gains) {
  if (member_gains.empty()) throw DomainError("gamma_moments: empty subset");
  double s1 = 0.0;
  double s2 = 0.0;
  for (double g : member_gains) {
    if (!(g > 0.0)) throw DomainError("gamma_moments: gains must be > 0");
    s1 += g;
    s2 += g * g;
  }
  return {s1 * s1 / s2, s2 / s1};
}

double selection_probability(double d_jr, double alpha, double sigma_r2, double tau) {
  if (!(d_jr > 0.0)) throw DomainError("selection_probability: distance must be > 0");
  if (!(tau >= 0.0)) throw DomainError("selection_probability: tau must be >= 0");
  if (tau == 0.0) return 0.0;
  return -std::expm1(-std::pow(d_jr, alpha) * sigma_r2 * tau);
}

GammaFits::GammaFits(std::span<const double> warden_gains) : gains_(warden_gains.begin(), warden_gains.end()) {
  check_capacity(gains_.size());
  for (double g : gains_)
    if (!(g > 0.0)) throw DomainError("GammaFits: gains must be > 0");

  const std::size_t count = subset_count();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  entries_.assign(count, Entry{nan, nan, nan});
  // running first and second power sums, built from the mask without its lowest bit
  std::vector<double> s1(count, 0.0), s2(count, 0.0);
  for (std::size_t mask = 1; mask < count; ++mask) {
    const std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
    const std::size_t rest = mask & (mask - 1);
    const double g = gains_[low];
    s1[mask] = s1[rest] + g;
    s2[mask] = s2[rest] + g * g;
    const double shape = s1[mask] * s1[mask] / s2[mask];
    entries_[mask] = {shape, s2[mask] / s1[mask], std::lgamma(shape)};
  }
}

int SubsetModel::cardinality() const { return std::popcount(members); }

std::vector<double> subset_probabilities(std::span<const double> selection_probs) {
  check_capacity(selection_probs.size());
  std::vector<double> probs(std::size_t{1} << selection_probs.size(), 0.0);
  probs[0] = 1.0;
  std::size_t filled = 1;
  for (std::size_t k = 0; k < selection_probs.size(); ++k) {
    const double p = selection_probs[k];
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("subset_probabilities: probability outside [0,1]");
    for (std::size_t m = 0; m < filled; ++m) {
      probs[m | filled] = probs[m] * p;
      probs[m] *= 1.0 - p;
    }
    filled <<= 1;
  }
  return probs;
}

SubsetEnsemble::SubsetEnsemble(std::shared_ptr<const GammaFits> fits, std::vector<double> selection_probs)
    : fits_(std::move(fits)), selection_probs_(std::move(selection_probs)) {
  if (!fits_) throw DomainError("SubsetEnsemble: missing gamma fits");
  if (fits_->helper_count() != selection_probs_.size())
    throw DomainError("SubsetEnsemble: helper count mismatch between fits and probabilities");
  probabilities_ = subset_probabilities(selection_probs_);
}

SubsetModel SubsetEnsemble::subset(std::uint32_t mask) const {
  SubsetModel out;
  out.members = mask;
  out.probability = probabilities_.at(mask);
  const auto& fit = (*fits_)[mask];
  out.shape_v = fit.shape_v;
  out.scale_w = fit.scale_w;
  return out;
}

std::vector<double> selection_probabilities(const NetworkGeometry& geometry, const SystemParams& params) {
  std::vector<double> p(geometry.helper_count());
  for (std::size_t k = 0; k < p.size(); ++k)
    p[k] = selection_probability(geometry.d_jr(k), geometry.alpha, params.sigma_r2_w, params.tau);
  return p;
}

std::shared_ptr<const GammaFits> fit_subset_gammas(const NetworkGeometry& geometry) {
  check_capacity(geometry.helper_count());
  return std::make_shared<const GammaFits>(warden_gains(geometry));
}

SubsetEnsemble enumerate_subsets(const NetworkGeometry& geometry, const SystemParams& params) {
  check_capacity(geometry.helper_count());
  return SubsetEnsemble(fit_subset_gammas(geometry), selection_probabilities(geometry, params));
}

}  // namespace covjam
