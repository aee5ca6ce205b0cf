#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "covjam/geometry.hpp"

namespace covjam {

/// Exact enumeration covers all 2^N jammer subsets, so N is capped.
inline constexpr std::size_t kMaxHelpers = 20;

/// Gamma law fitted to X = sum_{q in subset} |h_q|^2 g_q by matching mean and variance.
struct GammaMoments {
  double shape_v = 0.0;
  double scale_w = 0.0;
};

/// shape = (sum g)^2 / sum g^2, scale = sum g^2 / sum g. Throws DomainError on
/// an empty list or a non-positive gain.
GammaMoments gamma_moments(std::span<const double> member_gains);

/// 1 - exp(-d^alpha sigma_r^2 tau): probability that |h|^2 d^-alpha / sigma_r^2 < tau.
double selection_probability(double d_jr, double alpha, double sigma_r2, double tau);

/// Gamma fits for every non-empty subset, keyed by member bit-set. Depends
/// only on warden-side gains, so one table serves a whole tau sweep.
class GammaFits {
 public:
  struct Entry {
    double shape_v;
    double scale_w;
    double lgamma_v;
  };

  explicit GammaFits(std::span<const double> warden_gains);

  std::size_t helper_count() const { return gains_.size(); }
  std::size_t subset_count() const { return std::size_t{1} << gains_.size(); }
  std::span<const double> gains() const { return gains_; }
  /// mask must be non-zero.
  const Entry& operator[](std::uint32_t mask) const { return entries_[mask]; }
  const Entry& full() const { return entries_[subset_count() - 1]; }

 private:
  std::vector<double> gains_;
  std::vector<Entry> entries_;  // entry 0 (empty subset) is NaN
};

struct SubsetModel {
  std::uint32_t members = 0;
  double probability = 0.0;
  /// NaN for the empty subset.
  double shape_v = 0.0;
  double scale_w = 0.0;

  int cardinality() const;
  bool contains(std::size_t helper) const { return (members >> helper) & 1u; }
  bool empty() const { return members == 0; }
};

/// P(selected set = mask) = prod_{q in mask} p_q prod_{l not in mask} (1 - p_l),
/// for every mask in [0, 2^N).
std::vector<double> subset_probabilities(std::span<const double> selection_probs);

/// All 2^N subsets with their occurrence probabilities and gamma fits.
class SubsetEnsemble {
 public:
  SubsetEnsemble(std::shared_ptr<const GammaFits> fits, std::vector<double> selection_probs);

  std::size_t helper_count() const { return selection_probs_.size(); }
  std::size_t size() const { return probabilities_.size(); }
  SubsetModel subset(std::uint32_t mask) const;
  double probability(std::uint32_t mask) const { return probabilities_.at(mask); }
  double empty_probability() const { return probabilities_.front(); }
  std::span<const double> probabilities() const { return probabilities_; }
  std::span<const double> selection_probs() const { return selection_probs_; }
  const GammaFits& fits() const { return *fits_; }
  std::shared_ptr<const GammaFits> shared_fits() const { return fits_; }

 private:
  std::shared_ptr<const GammaFits> fits_;
  std::vector<double> selection_probs_;
  std::vector<double> probabilities_;
};

/// Per-helper selection probabilities at params.tau.
std::vector<double> selection_probabilities(const NetworkGeometry& geometry, const SystemParams& params);

/// Throws CapacityExceeded for more than kMaxHelpers helpers.
SubsetEnsemble enumerate_subsets(const NetworkGeometry& geometry, const SystemParams& params);
std::shared_ptr<const GammaFits> fit_subset_gammas(const NetworkGeometry& geometry);

}  // namespace covjam
