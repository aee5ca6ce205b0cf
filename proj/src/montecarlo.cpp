#include "covjam/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "covjam/errors.hpp"
#include "covjam/numerics.hpp"
#include "covjam/parallel.hpp"
#include "covjam/random.hpp"
#include "covjam/subsets.hpp"

namespace covjam {
namespace {

constexpr std::uint64_t kFadingStream = 0x66616465;
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;
constexpr std::uint64_t kKsStream = 0x6b737373;

std::size_t block_count(std::size_t trials) { return (trials + kMcBlockTrials - 1) / kMcBlockTrials; }

std::size_t block_size(std::size_t trials, std::size_t b) {
  return std::min(kMcBlockTrials, trials - b * kMcBlockTrials);
}

Rng block_rng(std::uint64_t seed, std::uint64_t stream, std::size_t block) {
  return Rng(derive_seed(derive_seed(seed, stream), block));
}

/// sum of n unit-mean |z|^2, z ~ CN(0, 1), divided by n.
double sample_power_mean(Rng& rng, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    acc += 0.5 * (re * re + im * im);
  }
  return acc / static_cast<double>(n);
}

}  // namespace

void McConfig::validate() const {
  if (trials < 1) throw DomainError("McConfig: trials must be >= 1");
  if (n_channel_uses && *n_channel_uses < 1) throw DomainError("McConfig: n_channel_uses must be >= 1");
}

McEstimate indicator_estimate(std::uint64_t hits, std::size_t trials) {
  const double n = static_cast<double>(trials);
  const double v = static_cast<double>(hits) / n;
  return {v, std::sqrt(v * (1.0 - v) / n)};
}

DetectionEstimate simulate_detection(const NetworkGeometry& geometry, const SystemParams& params, double mu,
                                     const McConfig& cfg) {
  geometry.validate();
  params.validate();
  cfg.validate();
  if (!(mu > 0.0)) throw DomainError("simulate_detection: mu must be > 0");

  const std::size_t n_helpers = geometry.helper_count();
  const auto gw = warden_gains(geometry);
  std::vector<double> select_below(n_helpers);
  for (std::size_t k = 0; k < n_helpers; ++k)
    select_below[k] = params.tau * params.sigma_r2_w * std::pow(geometry.d_jr(k), geometry.alpha);
  const double signal_scale = params.pt_w * path_gain(geometry.d_tw(), geometry.alpha);

  const std::size_t blocks = block_count(cfg.trials);
  std::vector<std::array<std::uint64_t, 2>> counts(blocks, {0, 0});
  parallel_for(blocks, [&](std::size_t b) {
    Rng fading = block_rng(cfg.seed, kFadingStream, b);
    Rng noise = block_rng(cfg.seed, kNoiseStream, b);
    std::uint64_t fa = 0, md = 0;
    for (std::size_t t = 0, m = block_size(cfg.trials, b); t < m; ++t) {
      double jam = 0.0;
      for (std::size_t k = 0; k < n_helpers; ++k) {
        const double h_jr = fading.exponential();
        const double h_jw = fading.exponential();
        if (h_jr < select_below[k]) jam += gw[k] * h_jw;
      }
      const double h_tw = fading.exponential();
      double t0 = params.pj_w * jam + params.sigma_w2_w;
      double t1 = t0 + signal_scale * h_tw;
      if (cfg.n_channel_uses) {
        const double scale = sample_power_mean(noise, *cfg.n_channel_uses);
        t0 *= scale;
        t1 *= scale;
      }
      fa += t0 > mu;
      md += t1 <= mu;
    }
    counts[b] = {fa, md};
  });

  std::uint64_t fa = 0, md = 0;
  for (const auto& c : counts) {
    fa += c[0];
    md += c[1];
  }
  return {indicator_estimate(fa, cfg.trials), indicator_estimate(md, cfg.trials),
          indicator_estimate(fa + md, cfg.trials)};
}

McEstimate simulate_outage(const NetworkGeometry& geometry, const SystemParams& params, double rate,
                           const McConfig& cfg) {
  geometry.validate();
  params.validate();
  cfg.validate();
  if (!(rate >= 0.0)) throw DomainError("simulate_outage: rate must be >= 0");

  const std::size_t n_helpers = geometry.helper_count();
  const auto gr = receiver_gains(geometry);
  const double gain_tr = path_gain(geometry.d_tr(), geometry.alpha);
  const double sigma_r2 = params.sigma_r2_w;

  const std::size_t blocks = block_count(cfg.trials);
  std::vector<std::uint64_t> counts(blocks, 0);
  parallel_for(blocks, [&](std::size_t b) {
    Rng fading = block_rng(cfg.seed, kFadingStream, b);
    std::uint64_t out = 0;
    for (std::size_t t = 0, m = block_size(cfg.trials, b); t < m; ++t) {
      double interference = 0.0;
      for (std::size_t k = 0; k < n_helpers; ++k) {
        const double p = gr[k] * fading.exponential();
        if (p < params.tau * sigma_r2) interference += p;
      }
      const double sinr = params.pt_w * gain_tr * fading.exponential() / (params.pj_w * interference + sigma_r2);
      out += std::log2(1.0 + sinr) < rate;
    }
    counts[b] = out;
  });

  std::uint64_t out = 0;
  for (auto c : counts) out += c;
  return indicator_estimate(out, cfg.trials);
}

double empirical_subset_power_ks(const NetworkGeometry& geometry, std::uint32_t subset, std::size_t trials,
                                 std::uint64_t seed) {
  geometry.validate();
  if (subset == 0) throw DomainError("empirical_subset_power_ks: subset must be non-empty");
  if (trials < 1) throw DomainError("empirical_subset_power_ks: trials must be >= 1");
  const auto gw_all = warden_gains(geometry);
  if (subset >> gw_all.size()) throw DomainError("empirical_subset_power_ks: subset names a missing helper");
  std::vector<double> gw;
  for (std::size_t k = 0; k < gw_all.size(); ++k)
    if ((subset >> k) & 1u) gw.push_back(gw_all[k]);
  const auto fit = gamma_moments(gw);
  const double lg = std::lgamma(fit.shape_v);

  std::vector<double> x(trials);
  const std::size_t blocks = block_count(trials);
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng = block_rng(seed, kKsStream, b);
    const std::size_t base = b * kMcBlockTrials;
    for (std::size_t t = 0, m = block_size(trials, b); t < m; ++t) {
      double s = 0.0;
      for (double g : gw) s += g * rng.exponential();
      x[base + t] = s;
    }
  });
  std::sort(x.begin(), x.end());

  const double n = static_cast<double>(trials);
  std::vector<double> local(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t base = b * kMcBlockTrials;
    double d = 0.0;
    for (std::size_t t = 0, m = block_size(trials, b); t < m; ++t) {
      const std::size_t i = base + t;
      const double cdf = numerics::reg_gamma_lower(fit.shape_v, x[i] / fit.scale_w, lg);
      d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    local[b] = d;
  });
  return *std::max_element(local.begin(), local.end());
}

std::vector<ConvergenceRow> finite_n_convergence(const NetworkGeometry& geometry, const SystemParams& params,
                                                 double mu, std::uint64_t seed, std::size_t trials) {
  std::vector<ConvergenceRow> rows;
  for (std::size_t n : {10, 100, 1000, 10000}) {
    const McConfig cfg{seed, trials, n};
    rows.push_back({n, simulate_detection(geometry, params, mu, cfg).xi_bar});
  }
  rows.push_back({std::nullopt, simulate_detection(geometry, params, mu, {seed, trials, std::nullopt}).xi_bar});
  return rows;
}

}  // namespace covjam
