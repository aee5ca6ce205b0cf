// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "covjam/detection.hpp"
#include "covjam/errors.hpp"
#include "covjam/experiment.hpp"
#include "covjam/montecarlo.hpp"
#include "covjam/numerics.hpp"
#include "covjam/optimizer.hpp"
#include "covjam/outage.hpp"
#include "covjam/random.hpp"

using namespace covjam;

namespace {

constexpr std::uint64_t kAcceptanceSeed = 2026;
constexpr std::size_t kLayoutSeed = 136;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

SystemParams paper_params(double pj_dbm, double tau = 0.0) {
  SystemParams p;
  p.pt_w = dbm_to_watts(10.0);
  p.pj_w = dbm_to_watts(pj_dbm);
  p.sigma_r2_w = dbm_to_watts(-120.0);
  p.sigma_w2_w = dbm_to_watts(-120.0);
  p.tau = tau;
  return p;
}

NetworkGeometry layout(std::uint64_t seed, std::size_t n, double d_tw_factor = 1.2) {
  return generate_geometry(seed, n, 1000.0, d_tw_factor * 1000.0, std::numbers::pi / 2, 4.0);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct RandomConfig {
  NetworkGeometry geometry;
  SystemParams params;
  double rate;
};

std::vector<RandomConfig> random_configs(std::uint64_t stream) {
  Rng rng(derive_seed(kAcceptanceSeed, stream));
  const double rates[] = {0.5, 1.0, 2.0};
  std::vector<RandomConfig> out;
  for (int i = 0; i < 25; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 10.0);
    const double lg_tau = -1.0 + 5.0 * rng.uniform();
    const double pj_dbm = 15.0 * rng.uniform();
    const double rate = rates[static_cast<int>(rng.uniform() * 3.0)];
    const std::uint64_t seed = static_cast<std::uint64_t>(rng.uniform() * 1e9);
    out.push_back({layout(seed, n), paper_params(pj_dbm, std::pow(10.0, lg_tau)), rate});
  }
  return out;
}

// 1. analytic outage vs 10^6-trial simulation, 3 binomial standard errors
Outcome outage_oracle() {
  Outcome o;
  double worst = 0.0;
  int i = 0;
  for (const auto& c : random_configs(1)) {
    const OutageContext ctx(c.geometry, c.params);
    const double delta = outage_probability(ctx, c.rate, c.params.tau);
    const auto mc = simulate_outage(c.geometry, c.params, c.rate, {derive_seed(kAcceptanceSeed, 100 + i), 1'000'000});
    // binomial standard error under the analytic value, or the sample one if larger
    const double se = std::max(mc.std_err, std::sqrt(delta * (1.0 - delta) / 1e6));
    const double z = se > 0.0 ? std::abs(mc.value - delta) / se : (mc.value == delta ? 0.0 : INFINITY);
    worst = std::max(worst, z);
    o.require(z <= 3.0, fmt("config %.0f: |delta - mc| = %.3g std errors", i, z));
    ++i;
  }
  if (o.pass) o.detail = fmt("25 configs, worst deviation %.2f std errors", worst);
  return o;
}

// 2. analytic average detection error vs 10^6-trial simulation at the case-2 threshold
Outcome covertness_oracle() {
  Outcome o;
  double worst = 0.0;
  int i = 0;
  for (const auto& c : random_configs(2)) {
    const DetectionContext ctx(c.geometry, c.params);
    const double mu = min_avg_error_case2(ctx).mu_star;
    const double xi = avg_detection_error(ctx, mu);
    const auto mc = simulate_detection(c.geometry, c.params, mu, {derive_seed(kAcceptanceSeed, 200 + i), 1'000'000});
    const double tol = std::max(3.0 * mc.xi_bar.std_err, 0.02);
    const double err = std::abs(mc.xi_bar.value - xi);
    worst = std::max(worst, err);
    o.require(err <= tol, fmt("config %.0f: |xi_bar - mc| = %.4g > %.4g", i, err, tol));
    ++i;
  }
  if (o.pass) o.detail = fmt("25 configs, worst |xi_bar - mc| = %.4f", worst);
  return o;
}

// 3. KS distance of the gamma fit
Outcome gamma_audit() {
  Outcome o;
  const auto g = layout(kAcceptanceSeed, 12);
  Rng rng(derive_seed(kAcceptanceSeed, 3));
  double worst_mixed = 0.0;
  for (int size = 2; size <= 6; ++size) {
    for (int rep = 0; rep < 2; ++rep) {
      std::uint32_t mask = 0;
      while (std::popcount(mask) < size) mask |= 1u << static_cast<int>(rng.uniform() * 12.0);
      const double ks = empirical_subset_power_ks(g, mask, 1'000'000, derive_seed(kAcceptanceSeed, mask));
      worst_mixed = std::max(worst_mixed, ks);
      o.require(ks <= 0.02, fmt("subset %.0f (size %.0f): KS %.4f > 0.02", mask, size, ks));
    }
  }

  double worst_exact = 0.0;
  for (std::uint32_t k = 0; k < 4; ++k) {
    const double ks = empirical_subset_power_ks(g, 1u << k, 1'000'000, 31 + k);
    worst_exact = std::max(worst_exact, ks);
  }
  // helpers on a circle around W: equal gains, so the sum is exactly Erlang-m
  for (std::size_t m : {2u, 3u, 5u}) {
    NetworkGeometry eq = layout(1, 0);
    for (std::size_t k = 0; k < m; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.25) / m;
      eq.helpers.push_back({eq.warden.x + 700.0 * std::cos(phi), eq.warden.y + 700.0 * std::sin(phi)});
    }
    const double ks = empirical_subset_power_ks(eq, (1u << m) - 1, 1'000'000, 41 + m);
    worst_exact = std::max(worst_exact, ks);
  }
  o.require(worst_exact <= 0.003, fmt("exact-law subset KS %.4f > 0.003", worst_exact));
  o.detail = (o.pass ? "" : o.detail + "; ") +
             fmt("mixed sizes 2-6: max KS %.4f; exact laws: max KS %.4f", worst_mixed, worst_exact);
  return o;
}

// 4. tau -> 0 and tau -> infinity limits
Outcome limits() {
  Outcome o;
  double worst = 0.0;
  auto check = [&](double a, double b, const char* what) {
    worst = std::max(worst, std::abs(a - b));
    o.require(std::abs(a - b) <= 1e-6, std::string(what) + fmt(": difference %.3g", std::abs(a - b)));
  };
  for (std::uint64_t seed : {kLayoutSeed, std::uint64_t{7}, std::uint64_t{21}}) {
    const auto g = layout(seed, 8);
    const auto base = paper_params(10.0);
    const DetectionContext small(g, paper_params(10.0, 1e-8));
    const DetectionContext large(g, paper_params(10.0, 1e9));
    const double s2 = base.sigma_w2_w;
    for (double f : {1e-3, 1e-2, 0.1, 0.5}) {
      const double mu = s2 + f * (large.mu_upper() - s2);
      check(avg_detection_error(small, mu), -std::expm1(-small.rho2_of(mu)), "xi_bar(tau->0)");
      check(avg_detection_error(large, mu), avg_detection_error_limit_tau_inf(large, mu), "xi_bar(tau->inf)");
    }
    const OutageContext out(g, base);
    for (double r : {0.5, 1.0, 2.0, 4.0}) {
      check(outage_probability(out, r, 1e-9), 1.0 - out.lambda_of(r), "delta(tau->0)");
      check(outage_probability(out, r, 1e12), outage_limit_tau_inf(out, r), "delta(tau->inf)");
    }
  }
  if (o.pass) o.detail = fmt("worst deviation %.2g", worst);
  return o;
}

std::vector<OptimizationResult> g_optimizations;
std::vector<double> g_optimization_eps;
std::vector<NetworkGeometry> g_optimization_geometry;
std::vector<double> g_optimization_pj;

double record_tau_star(const NetworkGeometry& g, double pj_dbm, double eps) {
  const auto p = paper_params(pj_dbm);
  const auto r = try_maximize_throughput(DetectionContext(g, p), OutageContext(g, p), eps);
  if (r.feasible) {
    g_optimizations.push_back(r);
    g_optimization_eps.push_back(eps);
    g_optimization_geometry.push_back(g);
    g_optimization_pj.push_back(pj_dbm);
  }
  return r.feasible ? r.tau_star : INFINITY;
}

// 5. orderings and monotonicity
Outcome orderings() {
  Outcome o;
  const auto lg_grid = numerics::lin_space(-1.0, 4.0, 20);

  const DetectionContext six(layout(kLayoutSeed, 6), paper_params(10.0));
  for (double lt : lg_grid) {
    const auto ctx = six.with_tau(std::pow(10.0, lt));
    const double x1 = min_avg_error_case1(ctx);
    const double x2 = min_avg_error_case2(ctx).xi_bar;
    o.require(x1 <= x2 + 1e-9, fmt("xi1* %.6f > xi2* %.6f at lg tau %.2f", x1, x2, lt));
  }

  const auto ten = layout(kLayoutSeed, 10);
  double prev = -1.0;
  const DetectionContext ctx10(ten, paper_params(10.0));
  for (double lt : lg_grid) {
    const double v = min_avg_error_case2(ctx10.with_tau(std::pow(10.0, lt))).xi_bar;
    o.require(v >= prev - 1e-9, fmt("xi2* decreases in tau at lg tau %.2f", lt));
    prev = v;
  }
  for (double lt : {0.0, 1.0, 2.0, 3.0}) {
    prev = -1.0;
    for (double pj : numerics::lin_space(0.0, 20.0, 11)) {
      const double v = min_avg_error_case2(DetectionContext(ten, paper_params(pj, std::pow(10.0, lt)))).xi_bar;
      o.require(v >= prev - 1e-9, fmt("xi2* decreases in P_j at %.1f dBm, lg tau %.0f", pj, lt));
      prev = v;
    }
    prev = 2.0;
    for (double dtw : {1.2, 1.1, 1.0, 0.9, 0.8}) {
      const double v =
          min_avg_error_case2(DetectionContext(layout(kLayoutSeed, 10, dtw), paper_params(10.0, std::pow(10.0, lt))))
              .xi_bar;
      o.require(v <= prev + 1e-9, fmt("xi2* grows as d_tw shrinks to %.1f d0 at lg tau %.0f", dtw, lt));
      prev = v;
    }
  }

  for (double r : {0.5, 1.0, 2.0}) {
    const OutageContext out(ten, paper_params(10.0));
    const OutageContext weak(ten, paper_params(5.0));
    prev = 0.0;
    for (double lt : lg_grid) {
      const double d = outage_probability(out, r, std::pow(10.0, lt));
      o.require(d >= prev - 1e-15, fmt("delta decreases in tau at lg tau %.2f, R %.1f", lt, r));
      o.require(d >= outage_probability(weak, r, std::pow(10.0, lt)) - 1e-15, "delta decreases in P_j");
      o.require(d >= outage_probability(out, r / 2.0, std::pow(10.0, lt)) - 1e-15, "delta decreases in R");
      prev = d;
    }
  }

  // tau* over N on nested layouts, and over P_j
  const auto full = layout(kLayoutSeed, 12);
  prev = INFINITY;
  std::size_t feasible_n = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    const double t = record_tau_star(full.prefix(n), 10.0, 0.1);
    if (std::isinf(t)) {
      o.require(feasible_n == 0, fmt("N = %.0f infeasible after a feasible N", n));
      continue;
    }
    ++feasible_n;
    o.require(t <= prev * (1.0 + 1e-9), fmt("tau* increases from N = %.0f to %.0f", n - 1.0, n));
    prev = t;
  }
  prev = INFINITY;
  for (double pj : numerics::lin_space(6.0, 16.0, 6)) {
    const double t = record_tau_star(ten, pj, 0.1);
    o.require(t <= prev * (1.0 + 1e-9), fmt("tau* increases at P_j = %.0f dBm", pj));
    prev = t;
  }
  o.require(feasible_n >= 3, "fewer than three feasible helper counts");
  if (o.pass) o.detail = "xi1* <= xi2*; xi2* monotone in tau, P_j, d_tw; delta monotone in tau, R, P_j; tau* in N, P_j";
  return o;
}

// 6. constraint activity of every feasible optimization
Outcome constraint_activity() {
  Outcome o;
  const auto full = layout(kLayoutSeed, 9);
  for (double eps : {0.05, 0.2, 0.3})
    for (std::size_t n : {6u, 9u}) record_tau_star(full.prefix(n), 10.0, eps);
  double worst = 0.0;
  for (std::size_t i = 0; i < g_optimizations.size(); ++i) {
    const auto& r = g_optimizations[i];
    const DetectionContext ctx(g_optimization_geometry[i], paper_params(g_optimization_pj[i], r.tau_star));
    // re-evaluated through the quadrature route, independent of the closed form used by the search
    const double xi = g_optimization_geometry[i].helper_count() <= 9
                          ? min_avg_error_case2(ctx, AverageRoute::Quadrature).xi_bar
                          : min_avg_error_case2(ctx).xi_bar;
    const double gap = std::abs(xi - (1.0 - g_optimization_eps[i]));
    worst = std::max(worst, gap);
    o.require(gap <= 1e-6, fmt("run %.0f: |xi2*(tau*) - (1 - eps)| = %.3g", i, gap));
  }
  o.require(g_optimizations.size() >= 10, "too few feasible runs");
  if (o.pass) o.detail = fmt("%.0f feasible runs, worst gap %.2g", g_optimizations.size(), worst);
  return o;
}

// 7. rate optimizer against a 10^4-point grid
Outcome rate_optimizer() {
  Outcome o;
  double worst = 0.0;
  for (std::size_t n = 0; n <= 6; ++n) {
    const OutageContext ctx(layout(300 + n, n), paper_params(3.0 + 2.0 * n));
    for (double tau : {0.5, 20.0, 500.0, 1e4}) {
      const auto r = optimal_rate(ctx, tau);
      const double hi = rate_ceiling(ctx, tau);
      double grid = 0.0;
      for (int i = 1; i <= 10000; ++i) grid = std::max(grid, covert_throughput(ctx, hi * i / 10000.0, tau).omega);
      const double rel = std::abs(r.omega_star - grid) / grid;
      worst = std::max(worst, rel);
      o.require(rel <= 1e-6 || r.omega_star > grid, fmt("N %.0f: omega* off the grid maximum by %.3g", n, rel));
      o.require(covert_throughput(ctx, 1e-9, tau).omega <= 1e-8, "omega does not vanish as R -> 0");
      o.require(covert_throughput(ctx, 60.0, tau).omega <= 1e-9, "omega does not vanish as R -> infinity");
    }
  }
  if (o.pass) o.detail = fmt("28 instances, worst relative gap %.2g", worst);
  return o;
}

// 8. minimum helper count and saturation of omega*(N)
Outcome min_helper_count() {
  Outcome o;
  const std::size_t n_max = 14;
  const auto full = layout(kLayoutSeed, n_max);
  const ScenarioGenerator scenario = [&](std::size_t n) { return full.prefix(n); };
  std::size_t n_min[2] = {0, 0};
  const double pjs[2] = {10.0, 5.0};
  for (int i = 0; i < 2; ++i) {
    try {
      n_min[i] = min_helpers(scenario, paper_params(pjs[i]), 0.1, dbm_to_watts(pjs[i]), n_max);
    } catch (const Infeasible&) {
      n_min[i] = n_max + 1;
    }
  }
  o.require(n_min[0] <= n_max, "no feasible N at 10 dBm");
  o.require(n_min[0] <= n_min[1], fmt("N_min(10 dBm) = %.0f > N_min(5 dBm) = %.0f", n_min[0], n_min[1]));

  std::string curve;
  std::vector<double> omega;
  for (std::size_t n = n_min[0]; n <= n_max; ++n) {
    const auto g = full.prefix(n);
    const auto p = paper_params(10.0);
    const auto r = try_maximize_throughput(DetectionContext(g, p), OutageContext(g, p), 0.1);
    o.require(r.feasible, fmt("N = %.0f infeasible above N_min", n));
    omega.push_back(r.omega_star);
    curve += (curve.empty() ? "" : " ") + fmt("%.4f", r.omega_star);
  }
  for (std::size_t i = 1; i < omega.size(); ++i)
    o.require(omega[i] >= omega[i - 1] - 1e-9, fmt("omega* decreases at N = %.0f", n_min[0] + i));
  // diminishing increments: the later half of the curve gains less per helper than the first half
  const std::size_t steps = omega.size() - 1;
  o.require(steps >= 4, "curve too short to judge saturation");
  if (steps >= 4) {
    const std::size_t half = steps / 2;
    const double early = (omega[half] - omega[0]) / half;
    const double late = (omega[steps] - omega[steps - half]) / half;
    o.require(late <= early, fmt("late increment %.4g > early increment %.4g", late, early));
  }
  o.detail = (o.pass ? "" : o.detail + "; ") + fmt("N_min = %.0f (10 dBm), %.0f (5 dBm); ", n_min[0], n_min[1]) +
             "omega*(N >= N_min) = " + curve;
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 9. byte-identical figure output
Outcome determinism() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / "covjam_acceptance";
  std::filesystem::remove_all(root);
  ExperimentConfig cfg;
  cfg.mc_trials = 200'000;
  for (const char* id : {"fig4", "fig5"}) {
    const auto a = reproduce_figure(id, cfg, root / "a");
    const auto b = reproduce_figure(id, cfg, root / "b");
    const auto ca = slurp(a.csv);
    o.require(!ca.empty() && ca == slurp(b.csv), std::string(id) + ": CSV differs between runs");
    const auto c = rerun_from_meta(a.meta, root / "c");
    o.require(slurp(c.csv) == ca, std::string(id) + ": re-run from meta.json differs");
  }
  std::filesystem::remove_all(root);
  if (o.pass) o.detail = "fig4 (with Monte Carlo) and fig5 identical across runs and meta.json re-runs";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double limit_s;
  };
  const std::vector<Criterion> criteria{
      {1, "outage oracle", outage_oracle, 120.0},
      {2, "covertness oracle", covertness_oracle, 300.0},
      {3, "gamma approximation audit", gamma_audit, 0.0},
      {4, "limit checks", limits, 0.0},
      {5, "ordering and monotonicity", orderings, 0.0},
      {6, "constraint activity", constraint_activity, 0.0},
      {7, "rate optimizer", rate_optimizer, 0.0},
      {8, "minimum helper count", min_helper_count, 180.0},
      {9, "determinism", determinism, 0.0},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0.0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt(" (runtime %.1f s exceeds %.0f s)", secs, c.limit_s);
    }
    all = all && o.pass;
    std::printf("criterion %d %-28s %s  %.1fs  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
