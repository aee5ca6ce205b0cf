#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "covjam/config.hpp"

namespace covjam {

enum class SweepVariable { LgTau, Rate, Epsilon, NHelpers, PjDbm };

enum class Target { XiBar, Xi1Star, Xi2Star, Delta, Omega, TauStar, OmegaStar };

SweepVariable parse_sweep_variable(const std::string& name);
Target parse_target(const std::string& name);
std::string to_string(SweepVariable v);
std::string to_string(Target t);

/// Numeric table; NaN cells are written as empty fields.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
};

/// Sweep points: lg_tau uses the lg_tau grid, n_helpers every integer in
/// [sweep_lo, sweep_hi], the others sweep_points values from sweep_lo to sweep_hi.
std::vector<double> sweep_grid(const ExperimentConfig& cfg, SweepVariable var);

/// Config with the sweep variable set to x.
ExperimentConfig at_point(ExperimentConfig cfg, SweepVariable var, double x);

/// One row per sweep point. Column order: sweep variable, then each target in
/// enum order, each followed by its Monte Carlo value and standard error when
/// cfg.mc is set and the target has a simulator. tau_star / omega_star add
/// rate_star and a feasible flag; infeasible points leave them empty.
Table run_sweep(const ExperimentConfig& cfg, SweepVariable var, const std::set<Target>& targets);

std::vector<std::string> figure_ids();

struct FigureFiles {
  std::filesystem::path csv;
  std::filesystem::path meta;
};

/// Writes <id>.csv and <id>.meta.json into out_dir. The preset pins the
/// parameters a figure fixes; everything else comes from base.
FigureFiles reproduce_figure(const std::string& id, const ExperimentConfig& base,
                             const std::filesystem::path& out_dir);

/// Re-runs the figure recorded in a meta.json sidecar.
FigureFiles rerun_from_meta(const std::filesystem::path& meta_path, const std::filesystem::path& out_dir);

}  // namespace covjam
