#include "covjam/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "covjam/errors.hpp"
#include "covjam/random.hpp"

namespace covjam {

double distance(const NodePosition& a, const NodePosition& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

NetworkGeometry NetworkGeometry::prefix(std::size_t n) const {
  if (n > helpers.size()) throw DomainError("prefix: only " + std::to_string(helpers.size()) + " helpers available");
  NetworkGeometry out = *this;
  out.helpers.resize(n);
  return out;
}

void NetworkGeometry::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("geometry: alpha must be > 0");
  auto finite = [](const NodePosition& p) { return std::isfinite(p.x) && std::isfinite(p.y); };
  if (!finite(tx) || !finite(rx) || !finite(warden)) throw DomainError("geometry: non-finite coordinate");
  if (!(d_tr() > 0.0)) throw DomainError("geometry: T and R coincide");
  if (!(d_tw() > 0.0)) throw DomainError("geometry: T and W coincide");
  for (std::size_t k = 0; k < helpers.size(); ++k) {
    if (!finite(helpers[k])) throw DomainError("geometry: non-finite helper coordinate");
    if (!(d_jr(k) > 0.0) || !(d_jw(k) > 0.0))
      throw DomainError("geometry: helper " + std::to_string(k) + " coincides with R or W");
  }
}

void SystemParams::validate() const {
  if (!(pt_w > 0.0)) throw DomainError("params: pt_w must be > 0");
  if (!(pj_w > 0.0)) throw DomainError("params: pj_w must be > 0");
  if (!(sigma_r2_w > 0.0)) throw DomainError("params: sigma_r2_w must be > 0");
  if (!(sigma_w2_w > 0.0)) throw DomainError("params: sigma_w2_w must be > 0");
  if (!(tau >= 0.0)) throw DomainError("params: tau must be >= 0");
  if (!(rate_r >= 0.0)) throw DomainError("params: rate_r must be >= 0");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("params: epsilon must be in [0,1]");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) throw DomainError("watts_to_dbm: power must be > 0");
  return 10.0 * std::log10(watts) + 30.0;
}

double path_gain(double d, double alpha) {
  if (!(d > 0.0)) throw DomainError("path_gain: distance must be > 0");
  return std::pow(d, -alpha);
}

NetworkGeometry generate_geometry(std::uint64_t seed, std::size_t n_helpers, double d_tr,
                                  double d_tw, double theta_w, double alpha) {
  if (!(d_tr > 0.0)) throw DomainError("generate_geometry: d_tr must be > 0");
  if (!(d_tw > 0.0)) throw DomainError("generate_geometry: d_tw must be > 0");

  NetworkGeometry g;
  g.tx = {0.0, 0.0};
  g.rx = {d_tr, 0.0};
  g.warden = {d_tw * std::cos(theta_w), d_tw * std::sin(theta_w)};
  g.alpha = alpha;

  const double radius = 2.0 * d_tr;
  Rng rng(derive_seed(seed, 0x67656f6dull));
  g.helpers.reserve(n_helpers);
  for (std::size_t k = 0; k < n_helpers; ++k) {
    // sqrt of a uniform gives area-uniform radii
    const double r = radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    g.helpers.push_back({r * std::cos(phi), r * std::sin(phi)});
  }
  g.validate();
  return g;
}

std::vector<double> warden_gains(const NetworkGeometry& g) {
  std::vector<double> out(g.helper_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = path_gain(g.d_jw(k), g.alpha);
  return out;
}

std::vector<double> receiver_gains(const NetworkGeometry& g) {
  std::vector<double> out(g.helper_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = path_gain(g.d_jr(k), g.alpha);
  return out;
}

}  // namespace covjam
