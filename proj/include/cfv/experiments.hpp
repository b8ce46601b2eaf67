#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfv/config.hpp"
#include "cfv/observables.hpp"

namespace cfv {

std::vector<double> sweep_points(const SweepSpec& spec);

struct SweepRow {
  double parameter = 0.0;
  std::optional<double> evacuation_time;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Worst audit values over every run of the sweep.
  double max_density_overshoot = 0.0;
  double max_conservation_residual = 0.0;

  // Row with the smallest evacuation time (rows without one are skipped).
  const SweepRow* min_row() const;
};

// Runs the scenario once per sweep point. Every point is validated (CFL
// included) before the first run starts; execution order is arbitrary but
// results are indexed by point, so the table is deterministic.
SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec, int workers);

struct TraceSeries {
  std::vector<double> times;
  std::vector<double> exit_density;
};

struct FisResult {
  SweepResult sweep;
  std::map<double, TraceSeries> traces;  // keyed by v_max
};

// Evacuation time against free-flow speed, plus recorded exit-density traces
// for the velocities requested in the spec.
FisResult run_fis(const ScenarioConfig& base, const SweepSpec& spec, int workers);

struct BraessResult {
  SweepResult sweep;       // evacuation time against obstacle position
  double baseline = 0.0;   // same scenario with the obstacle removed
};

BraessResult run_braess(const ScenarioConfig& base, const SweepSpec& spec, int workers);

struct SlowZoneResult {
  SweepResult min_factor;
  SweepResult center;
  SweepResult v_max;
};

// The three slow-zone sweeps; each config carries its own axis.
SlowZoneResult run_slowzone(const ScenarioConfig& min_factor_cfg, const ScenarioConfig& center_cfg,
                            const ScenarioConfig& vmax_cfg, int workers);

struct ValidationRow {
  Index n_cells = 0;
  double dx = 0.0;
  double error = 0.0;  // relative L1 distance to the reference at error_time
};

struct ValidationReport {
  std::vector<ValidationRow> rows;  // one per level below the reference
  Index reference_cells = 0;
  double error_time = 0.0;
  double order = 0.0;
  double max_density_overshoot = 0.0;
  double max_conservation_residual = 0.0;
};

// Self-convergence study: reruns the scenario on nested grids (dt/dx kept
// fixed) and measures each level against the finest one.
ValidationReport run_validation(const ScenarioConfig& base, int workers,
                                std::vector<Index> cells = {625, 1250, 2500, 5000, 10000, 20000},
                                double error_time = 10.0);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct PropertyReport {
  std::uint64_t seed = 0;
  std::vector<PropertyCheck> checks;

  bool all_pass() const;
};

// Randomized structural checks of the scheme: Godunov flux against a
// brute-force extremum oracle, the L1 stability bound for prescribed
// constraint signals, monotonicity in the initial datum, BV stability of the
// constraint signal under refinement, and conservation/bounds audits of the
// bundled scenarios. Deterministic for a fixed seed.
PropertyReport run_property_suite(std::uint64_t seed, int workers);

// Built-in copies of the bundled scenarios (single source of truth; the JSON
// files in configs/ are asserted against these in the tests).
ScenarioConfig fis_scenario();
ScenarioConfig braess_scenario();
ScenarioConfig slowzone_scenario(double min_factor = 0.88, double center = -1.5,
                                 double v_max = 1.0);
ScenarioConfig validation_scenario();

}  // namespace cfv
