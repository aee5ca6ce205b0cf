#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covjam/config.hpp"
#include "covjam/errors.hpp"
#include "covjam/experiment.hpp"
#include "covjam/montecarlo.hpp"
#include "covjam/optimizer.hpp"
#include "covjam/outage.hpp"
#include "covjam/parallel.hpp"

namespace {

using namespace covjam;

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 0;
  std::vector<std::string> sets;
};

ExperimentConfig resolve(const GlobalOptions& g) {
  ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set", "expected key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

void emit(const GlobalOptions& g, const std::string& name, const Table& t) {
  if (g.out.empty()) {
    std::cout << t.to_csv();
    return;
  }
  std::filesystem::create_directories(g.out);
  const auto path = std::filesystem::path(g.out) / (name + ".csv");
  std::ofstream(path, std::ios::binary | std::ios::trunc) << t.to_csv();
  std::cout << path.string() << "\n";
}

double threshold_w(const ExperimentConfig& cfg, const DetectionContext& ctx) {
  return cfg.mu_dbm ? dbm_to_watts(*cfg.mu_dbm) : min_avg_error_case2(ctx).mu_star;
}

void run_detect(const GlobalOptions& g) {
  const auto cfg = resolve(g);
  const DetectionContext ctx(cfg.to_geometry(), cfg.to_params());
  const auto case2 = min_avg_error_case2(ctx);
  const double mu = threshold_w(cfg, ctx);
  Table t;
  t.header = {"lg_tau", "mu_w", "p_fa_prob", "xi_bar_prob", "xi2_star_prob", "mu_star_w"};
  t.rows.push_back({cfg.lg_tau, mu, false_alarm_rate(ctx, mu), avg_detection_error(ctx, mu), case2.xi_bar,
                    case2.mu_star});
  if (cfg.warden_csi_case == WardenCsi::Case1) {
    t.header.push_back("xi1_star_prob");
    t.rows.back().push_back(min_avg_error_case1(ctx));
  }
  emit(g, "detect", t);
}

void run_outage(const GlobalOptions& g) {
  const auto cfg = resolve(g);
  const OutageContext ctx(cfg.to_geometry(), cfg.to_params());
  const auto r = covert_throughput(ctx, cfg.rate_bits, cfg.tau());
  Table t;
  t.header = {"lg_tau", "rate_bps_hz", "delta_prob", "omega_bps_hz", "delta_tau0_prob", "delta_tau_inf_prob"};
  t.rows.push_back({cfg.lg_tau, cfg.rate_bits, r.delta, r.omega, outage_probability(ctx, cfg.rate_bits, 0.0),
                    outage_limit_tau_inf(ctx, cfg.rate_bits)});
  emit(g, "outage", t);
}

void run_optimize(const GlobalOptions& g) {
  const auto cfg = resolve(g);
  const auto geometry = cfg.to_geometry();
  const auto params = cfg.to_params();
  const auto r = maximize_throughput(DetectionContext(geometry, params), OutageContext(geometry, params),
                                     cfg.epsilon, cfg.warden_csi_case);
  Table t;
  t.header = {"epsilon", "tau_star_lin", "rate_star_bps_hz", "omega_star_bps_hz", "xi_bar_at_tau_star_prob"};
  t.rows.push_back({cfg.epsilon, r.tau_star, r.rate_star, r.omega_star, r.xi_bar_at_tau_star});
  emit(g, "optimize", t);
}

void run_sweep_cmd(const GlobalOptions& g, const std::string& var, const std::vector<std::string>& targets) {
  const auto cfg = resolve(g);
  std::set<Target> ts;
  for (const auto& t : targets) ts.insert(parse_target(t));
  emit(g, "sweep_" + var, run_sweep(cfg, parse_sweep_variable(var), ts));
}

void run_mc(const GlobalOptions& g, bool convergence, std::optional<std::uint32_t> ks_subset) {
  const auto cfg = resolve(g);
  const auto geometry = cfg.to_geometry();
  const auto params = cfg.to_params();
  const DetectionContext ctx(geometry, params);
  const double mu = threshold_w(cfg, ctx);
  if (convergence) {
    Table t;
    t.header = {"n_channel_uses", "xi_hat_prob", "xi_hat_se"};
    for (const auto& row : finite_n_convergence(geometry, params, mu, cfg.seed))
      t.rows.push_back({row.n_channel_uses ? static_cast<double>(*row.n_channel_uses) : INFINITY,
                        row.xi_hat.value, row.xi_hat.std_err});
    emit(g, "mc_convergence", t);
    return;
  }
  if (ks_subset) {
    Table t;
    t.header = {"subset_mask", "ks_distance"};
    t.rows.push_back({static_cast<double>(*ks_subset),
                      empirical_subset_power_ks(geometry, *ks_subset, cfg.mc_trials, cfg.seed)});
    emit(g, "mc_ks", t);
    return;
  }
  const auto det = simulate_detection(geometry, params, mu, cfg.to_mc());
  const auto out = simulate_outage(geometry, params, cfg.rate_bits, cfg.to_mc());
  Table t;
  t.header = {"lg_tau",         "mu_w",          "p_fa_mc",      "p_fa_mc_se",        "p_md_mc",    "p_md_mc_se",
              "xi_bar_mc",      "xi_bar_mc_se",  "xi_bar_prob",  "rate_bps_hz",       "delta_mc",   "delta_mc_se",
              "delta_prob"};
  t.rows.push_back({cfg.lg_tau, mu, det.p_fa.value, det.p_fa.std_err, det.p_md.value, det.p_md.std_err,
                    det.xi_bar.value, det.xi_bar.std_err, avg_detection_error(ctx, mu), cfg.rate_bits,
                    out.value, out.std_err,
                    outage_probability(OutageContext(geometry, params), cfg.rate_bits, params.tau)});
  emit(g, "mc", t);
}

void run_reproduce(const GlobalOptions& g, const std::vector<std::string>& ids, const std::string& from_meta) {
  const std::filesystem::path out = g.out.empty() ? std::filesystem::path("results") : std::filesystem::path(g.out);
  if (!from_meta.empty()) {
    const auto files = rerun_from_meta(from_meta, out);
    std::cout << files.csv.string() << "\n";
    return;
  }
  const auto cfg = resolve(g);
  for (const auto& id : ids) {
    const auto files = reproduce_figure(id, cfg, out);
    std::cout << files.csv.string() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covert throughput with threshold-selected cooperative jammers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", COVJAM_VERSION);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "overrides the configured seed");
  app.add_option("--out", g.out, "output directory (default: stdout, or ./results for reproduce)");
  app.add_option("--threads", g.threads, "worker threads (default: hardware concurrency)");
  app.add_option("--set", g.sets, "key=value override, applied after --config")->allow_extra_args(false);

  auto* detect = app.add_subcommand("detect", "average detection error at mu and its case-2 minimum");
  auto* outage = app.add_subcommand("outage", "outage probability and covert throughput at (tau, R)");
  auto* optimize = app.add_subcommand("optimize", "tau*, R*, omega* under the covertness constraint");

  auto* sweep = app.add_subcommand("sweep", "one CSV row per sweep point");
  std::string var = "lg_tau";
  std::vector<std::string> targets;
  sweep->add_option("--var", var, "lg_tau | rate | epsilon | n_helpers | pj_dbm");
  sweep->add_option("--targets", targets, "xi_bar xi1_star xi2_star delta omega tau_star omega_star")
      ->delimiter(',')
      ->required();

  auto* mc = app.add_subcommand("mc", "Monte Carlo estimates with standard errors");
  bool convergence = false;
  std::optional<std::uint32_t> ks_subset;
  mc->add_flag("--convergence", convergence, "finite-n radiometer convergence table");
  mc->add_option("--ks", ks_subset, "KS distance of the gamma fit for a helper bit-set");

  auto* reproduce = app.add_subcommand("reproduce", "write <id>.csv and <id>.meta.json");
  std::vector<std::string> ids;
  std::string from_meta;
  reproduce->add_option("--figure", ids, "fig2 .. fig10, or all")->delimiter(',');
  reproduce->add_option("--from-meta", from_meta, "re-run the figure recorded in a meta.json")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (g.threads > 0) set_thread_count(g.threads);
    if (*detect) run_detect(g);
    if (*outage) run_outage(g);
    if (*optimize) run_optimize(g);
    if (*sweep) run_sweep_cmd(g, var, targets);
    if (*mc) run_mc(g, convergence, ks_subset);
    if (*reproduce) {
      if (ids.size() == 1 && ids.front() == "all") ids = figure_ids();
      if (ids.empty() && from_meta.empty()) throw ConfigError("--figure", "give a figure id or --from-meta");
      run_reproduce(g, ids, from_meta);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
