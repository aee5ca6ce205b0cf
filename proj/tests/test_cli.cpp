#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "covjam/config.hpp"
#include "covjam/errors.hpp"
#include "covjam/experiment.hpp"

using namespace covjam;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("covjam_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(COVJAM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing and round trip") {
  const auto cfg = parse_config("# comment\nn_helpers = 6\npj_dbm=7.5  # trailing\n\nwarden_csi_case = case1\n"
                                "n_channel_uses = 100\nmu_dbm = -115\n");
  CHECK(cfg.n_helpers == 6);
  CHECK(cfg.pj_dbm == 7.5);
  CHECK(cfg.warden_csi_case == WardenCsi::Case1);
  CHECK(cfg.n_channel_uses == std::optional<std::size_t>(100));
  CHECK(cfg.mu_dbm == std::optional<double>(-115.0));
  CHECK(cfg.d_tw_factor == 1.2);
  const auto again = parse_config(cfg.to_text());
  CHECK(again.to_text() == cfg.to_text());

  const ExperimentConfig defaults;
  CHECK(defaults.d0_m == 1000.0);
  CHECK(defaults.alpha == 4.0);
  CHECK(defaults.pt_dbm == 10.0);
  CHECK(defaults.sigma_r2_dbm == -120.0);
  CHECK(defaults.sigma_w2_dbm == -120.0);
  CHECK(defaults.d_tr_factor == 1.0);
}

TEST_CASE("config errors name the field") {
  auto field_of = [](const std::string& text) {
    try {
      parse_config(text).validate();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("none");
  };
  CHECK(field_of("bogus = 1") == "bogus");
  CHECK(field_of("alpha = four") == "alpha");
  CHECK(field_of("epsilon = 1.5") == "epsilon");
  CHECK(field_of("lg_tau_lo = 5") == "lg_tau_lo");
  CHECK(field_of("sweep_points = 1") == "sweep_points");
  CHECK(field_of("n_helpers = 21") == "n_helpers");
  CHECK(field_of("warden_csi_case = case3") == "warden_csi_case");
  CHECK(field_of("just text") == "line 1");
}

TEST_CASE("number formatting is shortest round trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-15) == "1e-15");
  CHECK(format_number(2.0) == "2");
  const double x = 0.12345678901234567;
  CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("sweep table layout") {
  auto cfg = parse_config("n_helpers = 4\nlg_tau_points = 5\nmc = true\nmc_trials = 20000\n");
  const auto t = run_sweep(cfg, SweepVariable::LgTau, {Target::Xi2Star, Target::Delta});
  REQUIRE(t.rows.size() == 5);
  const std::vector<std::string> header{"lg_tau",     "xi2_star_prob", "xi2_star_prob_mc", "xi2_star_prob_mc_se",
                                        "delta_prob", "delta_prob_mc", "delta_prob_mc_se"};
  CHECK(t.header == header);
  for (const auto& row : t.rows) CHECK(row.size() == header.size());

  cfg = parse_config("sweep_lo = 0\nsweep_hi = 3\n");
  const auto n = run_sweep(cfg, SweepVariable::NHelpers, {Target::OmegaStar});
  REQUIRE(n.rows.size() == 4);
  CHECK(n.header.back() == "feasible");
  CHECK(n.rows[0].back() == 0.0);
  CHECK(std::isnan(n.rows[0][2]));
  CHECK(n.to_csv().find(",,") != std::string::npos);

  CHECK_THROWS_AS(run_sweep(parse_config("lg_tau_points = 0"), SweepVariable::LgTau, {Target::Delta}), ConfigError);
  CHECK_THROWS_AS(run_sweep(cfg, SweepVariable::Rate, {}), ConfigError);
  CHECK_THROWS_AS(parse_target("speed"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_variable("alpha"), ConfigError);
}

TEST_CASE("figure output is deterministic and re-runs from its sidecar") {
  const auto a = scratch("fig_a");
  const auto b = scratch("fig_b");
  const auto c = scratch("fig_c");
  const ExperimentConfig cfg;
  const auto fa = reproduce_figure("fig5", cfg, a);
  const auto fb = reproduce_figure("fig5", cfg, b);
  CHECK(slurp(fa.csv) == slurp(fb.csv));
  CHECK(slurp(fa.meta) == slurp(fb.meta));
  const auto fc = rerun_from_meta(fa.meta, c);
  CHECK(slurp(fc.csv) == slurp(fa.csv));

  const auto meta = nlohmann::json::parse(slurp(fa.meta));
  CHECK(meta["figure"] == "fig5");
  CHECK(meta["seed"] == cfg.seed);
  CHECK(meta["tool_version"] == COVJAM_VERSION);
  CHECK(meta["series"].size() == 4);
  CHECK_THROWS_AS(reproduce_figure("fig11", cfg, a), ConfigError);
}

TEST_CASE("figure 8 reports its absent baseline column") {
  const ExperimentConfig cfg;
  const auto dir = scratch("fig8");
  const auto files = reproduce_figure("fig8", cfg, dir);
  const auto meta = nlohmann::json::parse(slurp(files.meta));
  REQUIRE(meta["absent_columns"].size() == 1);
  CHECK(slurp(files.csv).find(meta["absent_columns"][0].get<std::string>()) == std::string::npos);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("cli");
  const std::string out = " --out " + dir.string();
  CHECK(run_cli("outage --set n_helpers=3" + out) == 0);
  CHECK(fs::exists(dir / "outage.csv"));
  CHECK(run_cli("detect --set n_helpers=3 --set lg_tau=2" + out) == 0);
  CHECK(run_cli("optimize --set n_helpers=6" + out) == 0);
  CHECK(run_cli("mc --set n_helpers=3 --set mc_trials=10000" + out) == 0);
  CHECK(run_cli("sweep --var rate --targets delta,omega --set n_helpers=3" + out) == 0);
  CHECK(run_cli("outage --set bogus=1" + out) == 2);
  CHECK(run_cli("outage --set epsilon=2" + out) == 2);
  CHECK(run_cli("sweep --var lg_tau --targets delta --set lg_tau_points=0 --out " + (dir / "empty").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "empty" / "sweep_lg_tau.csv"));
  CHECK(run_cli("optimize --set n_helpers=1 --set epsilon=0.001" + out) == 3);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("reproduce --figure fig99" + out) == 2);

  const auto cfg_path = dir / "run.cfg";
  std::ofstream(cfg_path) << "n_helpers = 2\nrate_bits = 2\n";
  CHECK(run_cli("--config " + cfg_path.string() + " outage" + out) == 0);
  CHECK(slurp(dir / "outage.csv").find("\n1,2,") != std::string::npos);
}
