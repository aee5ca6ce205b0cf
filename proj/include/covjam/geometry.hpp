#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace covjam {

struct NodePosition {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
};

double distance(const NodePosition& a, const NodePosition& b);

/// Placement of transmitter, receiver, warden and the N helper nodes.
struct NetworkGeometry {
  NodePosition tx;
  NodePosition rx;
  NodePosition warden;
  std::vector<NodePosition> helpers;
  double alpha = 4.0;  // path-loss exponent

  std::size_t helper_count() const { return helpers.size(); }

  double d_tr() const { return distance(tx, rx); }
  double d_tw() const { return distance(tx, warden); }
  double d_jr(std::size_t k) const { return distance(helpers.at(k), rx); }
  double d_jw(std::size_t k) const { return distance(helpers.at(k), warden); }

  /// First n helpers of this layout (nested-geometry construction).
  NetworkGeometry prefix(std::size_t n) const;

  /// Throws DomainError unless alpha > 0, every coordinate is finite and
  /// every distance used by the analytics is strictly positive.
  void validate() const;
};

/// Link-level constants, all linear units (watts, bits/s/Hz).
struct SystemParams {
  double pt_w = 1e-2;          // transmit power P_t
  double pj_w = 1e-2;          // per-jammer power P_j
  double sigma_r2_w = 1e-15;   // receiver noise
  double sigma_w2_w = 1e-15;   // warden noise
  double tau = 0.0;            // selection threshold on |h|^2 d^-alpha / sigma_r^2
  double rate_r = 1.0;         // transmission rate R
  double epsilon = 0.1;        // covertness budget

  void validate() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// d^-alpha. Throws DomainError for d <= 0.
double path_gain(double d, double alpha);

/// T at the origin, R at (d_tr, 0), W at d_tw on bearing theta_w, helpers
/// uniform over the disk of radius 2 d_tr around T. Helpers are drawn one at
/// a time from a single seeded stream, so the layout for n helpers is a
/// prefix of the layout for n + 1.
NetworkGeometry generate_geometry(std::uint64_t seed, std::size_t n_helpers, double d_tr,
                                  double d_tw, double theta_w, double alpha);

/// Per-helper gains d_{j,w}^-alpha and d_{j,r}^-alpha.
std::vector<double> warden_gains(const NetworkGeometry& g);
std::vector<double> receiver_gains(const NetworkGeometry& g);

}  // namespace covjam
