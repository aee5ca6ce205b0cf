#include "covjam/experiment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>

#include <json.hpp>

#include "covjam/errors.hpp"
#include "covjam/numerics.hpp"
#include "covjam/optimizer.hpp"
#include "covjam/outage.hpp"
#include "covjam/parallel.hpp"

namespace covjam {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, SweepVariable>& sweep_names() {
  static const std::map<std::string, SweepVariable> m{{"lg_tau", SweepVariable::LgTau},
                                                      {"rate", SweepVariable::Rate},
                                                      {"epsilon", SweepVariable::Epsilon},
                                                      {"n_helpers", SweepVariable::NHelpers},
                                                      {"pj_dbm", SweepVariable::PjDbm}};
  return m;
}

const std::map<std::string, Target>& target_names() {
  static const std::map<std::string, Target> m{{"xi_bar", Target::XiBar},     {"xi1_star", Target::Xi1Star},
                                               {"xi2_star", Target::Xi2Star}, {"delta", Target::Delta},
                                               {"omega", Target::Omega},      {"tau_star", Target::TauStar},
                                               {"omega_star", Target::OmegaStar}};
  return m;
}

std::string column_of(SweepVariable v) {
  switch (v) {
    case SweepVariable::LgTau: return "lg_tau";
    case SweepVariable::Rate: return "rate_bps_hz";
    case SweepVariable::Epsilon: return "epsilon";
    case SweepVariable::NHelpers: return "n_helpers";
    case SweepVariable::PjDbm: return "pj_dbm";
  }
  return {};
}

std::string column_of(Target t) {
  switch (t) {
    case Target::XiBar: return "xi_bar_prob";
    case Target::Xi1Star: return "xi1_star_prob";
    case Target::Xi2Star: return "xi2_star_prob";
    case Target::Delta: return "delta_prob";
    case Target::Omega: return "omega_bps_hz";
    case Target::TauStar: return "tau_star_lin";
    case Target::OmegaStar: return "omega_star_bps_hz";
  }
  return {};
}

bool has_simulator(Target t) {
  return t == Target::XiBar || t == Target::Xi2Star || t == Target::Delta || t == Target::Omega;
}

std::vector<std::string> sweep_header(SweepVariable var, const std::set<Target>& targets, bool mc) {
  std::vector<std::string> h{column_of(var)};
  for (Target t : targets) {
    if (t == Target::OmegaStar && targets.count(Target::TauStar)) continue;
    if (t == Target::TauStar || t == Target::OmegaStar) {
      if (targets.count(Target::TauStar)) h.push_back(column_of(Target::TauStar));
      h.push_back("rate_star_bps_hz");
      h.push_back(column_of(Target::OmegaStar));
      h.push_back("feasible");
      continue;
    }
    h.push_back(column_of(t));
    if (mc && has_simulator(t)) {
      h.push_back(column_of(t) + "_mc");
      h.push_back(column_of(t) + "_mc_se");
    }
  }
  return h;
}

std::vector<double> evaluate_point(const ExperimentConfig& cfg, const std::set<Target>& targets) {
  const auto geometry = cfg.to_geometry();
  const auto params = cfg.to_params();
  std::optional<DetectionContext> det;
  std::optional<OutageContext> out;
  std::optional<AverageMinimum> case2;
  auto detection = [&]() -> const DetectionContext& {
    if (!det) det.emplace(geometry, params);
    return *det;
  };
  auto outage = [&]() -> const OutageContext& {
    if (!out) out.emplace(geometry, params);
    return *out;
  };
  auto case2_min = [&]() -> const AverageMinimum& {
    if (!case2) case2 = min_avg_error_case2(detection());
    return *case2;
  };

  std::vector<double> row;
  const auto push_mc = [&](const McEstimate& e, double scale = 1.0) {
    row.push_back(scale * e.value);
    row.push_back(scale * e.std_err);
  };
  for (Target t : targets) {
    switch (t) {
      case Target::XiBar: {
        const double mu = cfg.mu_dbm ? dbm_to_watts(*cfg.mu_dbm) : case2_min().mu_star;
        row.push_back(avg_detection_error(detection(), mu));
        if (cfg.mc) push_mc(simulate_detection(geometry, params, mu, cfg.to_mc()).xi_bar);
        break;
      }
      case Target::Xi1Star:
        row.push_back(min_avg_error_case1(detection()));
        break;
      case Target::Xi2Star:
        row.push_back(case2_min().xi_bar);
        if (cfg.mc) push_mc(simulate_detection(geometry, params, case2_min().mu_star, cfg.to_mc()).xi_bar);
        break;
      case Target::Delta:
        row.push_back(outage_probability(outage(), cfg.rate_bits, params.tau));
        if (cfg.mc) push_mc(simulate_outage(geometry, params, cfg.rate_bits, cfg.to_mc()));
        break;
      case Target::Omega: {
        row.push_back(covert_throughput(outage(), cfg.rate_bits, params.tau).omega);
        if (cfg.mc) {
          auto e = simulate_outage(geometry, params, cfg.rate_bits, cfg.to_mc());
          e.value = 1.0 - e.value;
          push_mc(e, cfg.rate_bits);
        }
        break;
      }
      case Target::TauStar:
      case Target::OmegaStar: {
        if (t == Target::OmegaStar && targets.count(Target::TauStar)) break;
        const auto r = try_maximize_throughput(detection(), outage(), cfg.epsilon, cfg.warden_csi_case);
        if (targets.count(Target::TauStar)) row.push_back(r.feasible ? r.tau_star : kNaN);
        row.push_back(r.feasible ? r.rate_star : kNaN);
        row.push_back(r.feasible ? r.omega_star : kNaN);
        row.push_back(r.feasible ? 1.0 : 0.0);
        break;
      }
    }
  }
  return row;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

struct Series {
  std::string label;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool tau_from_optimum = false;
};

struct FigureSpec {
  std::string id;
  std::string title;
  SweepVariable var = SweepVariable::LgTau;
  std::set<Target> targets;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<Series> series;
  std::vector<std::string> assumptions;
  std::vector<std::string> absent_columns;
};

const std::string kDtwAssumption = "d_tw_factor = 1.2 (not given for this figure; taken from neighbouring figures)";

FigureSpec figure_spec(const std::string& id) {
  using T = Target;
  using V = SweepVariable;
  FigureSpec f;
  f.id = id;
  if (id == "fig2") {
    f.title = "xi1_star and xi2_star vs lg tau for several N";
    f.var = V::LgTau;
    f.targets = {T::Xi1Star, T::Xi2Star};
    f.overrides = {{"pj_dbm", "10"}, {"d_tw_factor", "1.2"}};
    f.series = {{"n4", {{"n_helpers", "4"}}}, {"n6", {{"n_helpers", "6"}}}, {"n8", {{"n_helpers", "8"}}}};
  } else if (id == "fig3") {
    f.title = "xi2_star vs lg tau for several P_j and d_tw";
    f.var = V::LgTau;
    f.targets = {T::Xi2Star};
    f.overrides = {{"n_helpers", "10"}};
    for (const char* pj : {"5", "10"})
      for (const char* dtw : {"1", "1.2"})
        f.series.push_back({std::string("pj") + pj + "_dtw" + dtw, {{"pj_dbm", pj}, {"d_tw_factor", dtw}}});
  } else if (id == "fig4") {
    f.title = "xi2_star and delta vs lg tau with Monte Carlo";
    f.var = V::LgTau;
    f.targets = {T::Xi2Star, T::Delta};
    f.overrides = {{"n_helpers", "4"}, {"rate_bits", "1"}, {"mc", "true"}, {"d_tw_factor", "1.2"}};
    f.series = {{"pj5", {{"pj_dbm", "5"}}}, {"pj10", {{"pj_dbm", "10"}}}};
    f.assumptions = {kDtwAssumption};
  } else if (id == "fig5") {
    f.title = "delta vs lg tau for several P_j and R";
    f.var = V::LgTau;
    f.targets = {T::Delta};
    f.overrides = {{"n_helpers", "10"}, {"d_tw_factor", "1.2"}};
    for (const char* r : {"1", "2"})
      for (const char* pj : {"5", "10"})
        f.series.push_back({std::string("pj") + pj + "_r" + r, {{"pj_dbm", pj}, {"rate_bits", r}}});
    f.assumptions = {"rate values 1 and 2 bits/s/Hz (not listed for this figure)"};
  } else if (id == "fig6") {
    f.title = "tau_star vs P_j for several N";
    f.var = V::PjDbm;
    f.targets = {T::TauStar};
    f.overrides = {{"epsilon", "0.1"}, {"d_tw_factor", "1.2"},
                   {"sweep_lo", "0"},  {"sweep_hi", "20"}, {"sweep_points", "11"}};
    f.series = {{"n5", {{"n_helpers", "5"}}}, {"n10", {{"n_helpers", "10"}}}, {"n15", {{"n_helpers", "15"}}}};
    f.assumptions = {kDtwAssumption};
  } else if (id == "fig7") {
    f.title = "omega vs R at tau_star for several N, both warden CSI cases";
    f.var = V::Rate;
    f.targets = {T::Omega};
    f.overrides = {{"pj_dbm", "10"}, {"d_tw_factor", "1.2"}, {"epsilon", "0.1"},
                   {"sweep_lo", "0"},  {"sweep_hi", "8"},       {"sweep_points", "41"}};
    for (const char* n : {"5", "8"})
      for (const char* c : {"case2", "case1"})
        f.series.push_back({std::string("n") + n + "_" + c, {{"n_helpers", n}, {"warden_csi_case", c}}, true});
  } else if (id == "fig8") {
    f.title = "omega_star vs epsilon for several N";
    f.var = V::Epsilon;
    f.targets = {T::OmegaStar};
    f.overrides = {{"pj_dbm", "10"}, {"d_tw_factor", "1.2"},
                   {"sweep_lo", "0.05"}, {"sweep_hi", "0.5"}, {"sweep_points", "10"}};
    f.series = {{"n5", {{"n_helpers", "5"}}}, {"n8", {{"n_helpers", "8"}}}, {"n10", {{"n_helpers", "10"}}}};
    f.absent_columns = {"omega_star_single_jammer_bps_hz"};
  } else if (id == "fig9") {
    f.title = "omega_star vs N for several P_j";
    f.var = V::NHelpers;
    f.targets = {T::OmegaStar};
    f.overrides = {{"d_tw_factor", "1.2"}, {"epsilon", "0.1"}, {"sweep_lo", "0"}, {"sweep_hi", "14"}};
    f.series = {{"pj5", {{"pj_dbm", "5"}}}, {"pj10", {{"pj_dbm", "10"}}}};
  } else if (id == "fig10") {
    f.title = "minimum helper count vs P_j";
    f.var = V::PjDbm;
    f.overrides = {{"d_tw_factor", "1.2"}, {"epsilon", "0.1"}, {"n_max", "14"},
                   {"sweep_lo", "0"},       {"sweep_hi", "15"},   {"sweep_points", "7"}};
    f.series = {{"", {}}};
  } else {
    throw ConfigError("figure", "unknown figure id '" + id + "'");
  }
  return f;
}

ExperimentConfig apply(ExperimentConfig cfg, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) cfg.set(k, v);
  return cfg;
}

Table min_helpers_table(const ExperimentConfig& cfg) {
  Table t;
  t.header = {column_of(SweepVariable::PjDbm), "n_min", "feasible"};
  const auto grid = sweep_grid(cfg, SweepVariable::PjDbm);
  t.rows.resize(grid.size());
  auto full = cfg;
  full.n_helpers = cfg.n_max;
  const auto geometry = full.to_geometry();
  const auto params = cfg.to_params();
  parallel_for(grid.size(), [&](std::size_t i) {
    try {
      const auto n = min_helpers([&](std::size_t k) { return geometry.prefix(k); }, params, cfg.epsilon,
                                 dbm_to_watts(grid[i]), cfg.n_max, cfg.warden_csi_case);
      t.rows[i] = {grid[i], static_cast<double>(n), 1.0};
    } catch (const Infeasible&) {
      t.rows[i] = {grid[i], kNaN, 0.0};
    }
  });
  return t;
}

nlohmann::ordered_json entries_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

}  // namespace

SweepVariable parse_sweep_variable(const std::string& name) {
  const auto it = sweep_names().find(name);
  if (it == sweep_names().end()) throw ConfigError("sweep_variable", "unknown sweep variable '" + name + "'");
  return it->second;
}

Target parse_target(const std::string& name) {
  const auto it = target_names().find(name);
  if (it == target_names().end()) throw ConfigError("targets", "unknown target '" + name + "'");
  return it->second;
}

std::string to_string(SweepVariable v) {
  for (const auto& [k, x] : sweep_names())
    if (x == v) return k;
  return {};
}

std::string to_string(Target t) {
  for (const auto& [k, x] : target_names())
    if (x == t) return k;
  return {};
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (!std::isnan(row[i])) out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<double> sweep_grid(const ExperimentConfig& cfg, SweepVariable var) {
  if (var == SweepVariable::LgTau) {
    if (!(cfg.lg_tau_lo < cfg.lg_tau_hi)) throw ConfigError("lg_tau_lo", "must be < lg_tau_hi");
    if (cfg.lg_tau_points < 2) throw ConfigError("lg_tau_points", "must be >= 2");
    return numerics::lin_space(cfg.lg_tau_lo, cfg.lg_tau_hi, cfg.lg_tau_points);
  }
  if (!(cfg.sweep_lo < cfg.sweep_hi)) throw ConfigError("sweep_lo", "must be < sweep_hi");
  if (var == SweepVariable::NHelpers) {
    const double lo = std::max(0.0, std::ceil(cfg.sweep_lo));
    const double hi = std::min(static_cast<double>(kMaxHelpers), std::floor(cfg.sweep_hi));
    if (lo > hi) throw ConfigError("sweep_lo", "no helper count in [sweep_lo, sweep_hi] within [0, 20]");
    std::vector<double> g;
    for (double n = lo; n <= hi; n += 1.0) g.push_back(n);
    return g;
  }
  if (cfg.sweep_points < 2) throw ConfigError("sweep_points", "must be >= 2");
  return numerics::lin_space(cfg.sweep_lo, cfg.sweep_hi, cfg.sweep_points);
}

ExperimentConfig at_point(ExperimentConfig cfg, SweepVariable var, double x) {
  switch (var) {
    case SweepVariable::LgTau: cfg.lg_tau = x; break;
    case SweepVariable::Rate: cfg.rate_bits = x; break;
    case SweepVariable::Epsilon: cfg.epsilon = x; break;
    case SweepVariable::NHelpers: cfg.n_helpers = static_cast<std::size_t>(x); break;
    case SweepVariable::PjDbm: cfg.pj_dbm = x; break;
  }
  return cfg;
}

Table run_sweep(const ExperimentConfig& cfg, SweepVariable var, const std::set<Target>& targets) {
  if (targets.empty()) throw ConfigError("targets", "at least one target is required");
  cfg.validate();
  const auto grid = sweep_grid(cfg, var);
  Table t;
  t.header = sweep_header(var, targets, cfg.mc);
  t.rows.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const auto point = at_point(cfg, var, grid[i]);
    point.validate();
    auto row = evaluate_point(point, targets);
    row.insert(row.begin(), grid[i]);
    t.rows[i] = std::move(row);
  });
  return t;
}

std::vector<std::string> figure_ids() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
}

FigureFiles reproduce_figure(const std::string& id, const ExperimentConfig& base,
                             const std::filesystem::path& out_dir) {
  const FigureSpec spec = figure_spec(id);
  base.validate();
  const ExperimentConfig fixed = apply(base, spec.overrides);

  nlohmann::ordered_json series_meta = nlohmann::ordered_json::array();
  Table merged;
  for (const auto& s : spec.series) {
    ExperimentConfig cfg = apply(fixed, s.overrides);
    nlohmann::ordered_json sm;
    sm["label"] = s.label;
    Table part;
    bool feasible = true;
    if (s.tau_from_optimum) {
      const DetectionContext ctx(cfg.to_geometry(), cfg.to_params());
      try {
        const double tau_star = optimal_tau(ctx, cfg.epsilon, cfg.warden_csi_case);
        cfg.lg_tau = std::log10(tau_star);
        sm["tau_star"] = tau_star;
      } catch (const Infeasible&) {
        feasible = false;
        sm["tau_star"] = nullptr;
      }
    }
    if (id == "fig10") {
      part = min_helpers_table(cfg);
    } else {
      part = run_sweep(cfg, spec.var, spec.targets);
      if (!feasible)
        for (auto& row : part.rows)
          for (std::size_t c = 1; c < row.size(); ++c) row[c] = kNaN;
    }
    sm["config"] = entries_json(cfg);
    series_meta.push_back(sm);

    if (merged.header.empty()) {
      merged.header.push_back(part.header.front());
      for (const auto& row : part.rows) merged.rows.push_back({row.front()});
    }
    for (std::size_t c = 1; c < part.header.size(); ++c)
      merged.header.push_back(s.label.empty() ? part.header[c] : part.header[c] + "_" + s.label);
    for (std::size_t r = 0; r < part.rows.size(); ++r)
      merged.rows[r].insert(merged.rows[r].end(), part.rows[r].begin() + 1, part.rows[r].end());
  }

  std::filesystem::create_directories(out_dir);
  FigureFiles files{out_dir / (id + ".csv"), out_dir / (id + ".meta.json")};
  write_file(files.csv, merged.to_csv());

  nlohmann::ordered_json meta;
  meta["figure"] = id;
  meta["title"] = spec.title;
  meta["tool_version"] = COVJAM_VERSION;
  meta["seed"] = base.seed;
  meta["csv"] = files.csv.filename().string();
  meta["sweep_variable"] = to_string(spec.var);
  meta["targets"] = nlohmann::ordered_json::array();
  for (Target t : spec.targets) meta["targets"].push_back(to_string(t));
  meta["base_config"] = entries_json(base);
  meta["preset_overrides"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : spec.overrides) meta["preset_overrides"][k] = v;
  meta["series"] = series_meta;
  meta["assumptions"] = spec.assumptions;
  meta["absent_columns"] = spec.absent_columns;
  write_file(files.meta, meta.dump(2) + "\n");
  return files;
}

FigureFiles rerun_from_meta(const std::filesystem::path& meta_path, const std::filesystem::path& out_dir) {
  std::ifstream in(meta_path);
  if (!in) throw ConfigError("meta", "cannot open '" + meta_path.string() + "'");
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("meta", std::string("malformed json: ") + e.what());
  }
  if (!meta.contains("figure") || !meta.contains("base_config"))
    throw ConfigError("meta", "missing figure or base_config");
  ExperimentConfig cfg;
  for (const auto& [k, v] : meta["base_config"].items()) cfg.set(k, v.get<std::string>());
  return reproduce_figure(meta["figure"].get<std::string>(), cfg, out_dir);
}

}  // namespace covjam
