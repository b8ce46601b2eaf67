#pragma once

#include <vector>

#include "cfv/grid.hpp"
#include "cfv/observables.hpp"

namespace cfv {

// Right-continuous step function of time: values[i] on [times[i], times[i+1]),
// values.front() before times.front(), values.back() from times.back() on.
struct StepSignal {
  std::vector<double> times;
  std::vector<double> values;

  double operator()(double t) const;
};

// One finite-volume evolution problem: time step, horizon, constraint sites,
// and (optionally) externally prescribed constraint signals. With `prescribed`
// empty the constraint values are the non-local ones, q = p(weighted average);
// otherwise prescribed[k] drives site k and the efficiencies are ignored.
struct SchemeConfig {
  double dt = 1.0;
  double t_end = 0.0;
  std::vector<ConstraintSite> sites;    // strictly increasing interface_index
  std::vector<StepSignal> prescribed;   // empty, or one signal per site
};

// Exact Godunov flux of the bell-shaped model at interface position x:
// min over [a,b] of f for a <= b, max over [b,a] otherwise, evaluated in
// closed form through the critical density. Errors outside [0, rho_max].
double godunov_flux(const FluxModel& model, double x, double a, double b);

// Largest stable time step, dx / (2 * v_max); the Lipschitz constant of the
// numerical flux is bounded by v_max since the speed multiplier is <= 1.
double cfl_max_dt(const Grid& g, const FluxModel& model);

struct SimState {
  long step = 0;
  double time = 0.0;
  Array rho;
  std::vector<double> q_current;  // constraint values used for the step from `time`
};

// All interface fluxes of the current state (n_cells + 1 values): free
// outflow at both ends via ghost-cell copies, constrained interfaces capped
// by q. Constraint values are taken from the state's density (non-local mode)
// or the signals at state.time (prescribed mode).
Array interface_fluxes(const SimState& state, const SchemeConfig& cfg, const Grid& g,
                       const FluxModel& model);

// One conservative update rho_j -= (dt/dx) (F_{j+1/2} - F_{j-1/2}).
SimState step(const SimState& state, const SchemeConfig& cfg, const Grid& g,
              const FluxModel& model);

struct RunOptions {
  bool record_timeseries = false;
  std::vector<double> snapshot_times;
  double evac_threshold = 1e-3;
  // Stop once the evacuation threshold is crossed and every reachable
  // snapshot has been taken; otherwise run to t_end.
  bool stop_at_evacuation = true;
};

// Projects the datum and iterates `step` until t_end (or early evacuation
// stop). The mass balance and the density bounds are audited on every step;
// the worst violations are reported in the output.
SimOutput run(const SchemeConfig& cfg, const Grid& g, const FluxModel& model,
              const InitialDatum& datum, const RunOptions& opt = {});

}  // namespace cfv
