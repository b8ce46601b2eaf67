#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cfv/grid.hpp"

namespace cfv {

// Everything a simulation reports. Time series are recorded per step when
// requested; the audit maxima are tracked on every step of every run.
struct SimOutput {
  // Per-step records (empty unless RunOptions::record_timeseries).
  std::vector<double> times;
  std::vector<std::vector<double>> q_history;  // [site][row], constraint value used at t^n
  std::vector<double> exit_trace;              // density in the cell left of the exit
  std::vector<double> mass_history;            // mass in cells left of the exit

  std::map<double, Array> snapshots;  // keyed by requested time, taken at the nearest step

  std::optional<double> evacuation_time;  // first t^n with upstream mass <= threshold
  double initial_mass_left = 0.0;
  double final_mass_left = 0.0;
  double final_time = 0.0;
  long steps = 0;
  Array final_rho;

  // Worst violations seen over the whole run.
  double max_density_overshoot = 0.0;      // distance of rho outside [0, rho_max]
  double max_conservation_residual = 0.0;  // per-step mass balance, relative
};

// First recorded time with mass_history <= threshold; nullopt if never.
std::optional<double> evacuation_time(const SimOutput& out, double threshold);

// Relative L1 distance between a coarse field and a reference on a nested
// finer grid, sampled at the coarse cell centers:
//   sum_j |ref(x_j) - rho_j| / sum_j |ref(x_j)|.
// Errors if the grids do not cover the same span or do not nest.
double relative_l1_error(const Grid& fine_grid, const Array& fine, const Grid& coarse_grid,
                         const Array& coarse);

// Least-squares slope of log(error) against log(dx). Needs >= 3 rows, and at
// least 2 with a strictly positive error.
double convergence_order(const std::vector<std::pair<double, double>>& dx_and_error);

// Total variation of a sampled signal.
double bv_norm(const std::vector<double>& q);

}  // namespace cfv
