#include "cfv/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cfv/util.hpp"

namespace cfv {

namespace {

// inv_rho_max is precomputed so the hot loops multiply instead of divide.
inline double lwr(double rho, double v_max, double inv_rho_max) {
  return v_max * rho * (1.0 - rho * inv_rho_max);
}

// Godunov flux of the unscaled bell-shaped flux, demand/supply form:
// min(f(min(a, sigma)), f(max(b, sigma))). Equals the interval extremum
// definition for any concave flux with maximum at sigma.
inline double godunov_unit(double a, double b, double v_max, double sigma, double inv_rho_max) {
  const double demand = lwr(a < sigma ? a : sigma, v_max, inv_rho_max);
  const double supply = lwr(b > sigma ? b : sigma, v_max, inv_rho_max);
  return demand < supply ? demand : supply;
}

void check_scheme(const SchemeConfig& cfg, const Grid& g, const FluxModel& model) {
  if (!(cfg.dt > 0.0)) throw ConfigError("dt: must be positive, got " + format_double(cfg.dt));
  const double dt_max = cfl_max_dt(g, model);
  if (cfg.dt > dt_max * (1.0 + 1e-12))
    throw ConfigError("dt: CFL violated, dt = " + format_double(cfg.dt) +
                      " exceeds dx / (2 v_max) = " + format_double(dt_max));
  for (std::size_t k = 0; k < cfg.sites.size(); ++k) {
    const Index j = cfg.sites[k].interface_index;
    if (j < 1 || j > g.n_cells - 1)
      throw ConfigError("sites[" + std::to_string(k) + "]: interface index " + std::to_string(j) +
                        " not strictly inside the grid");
    if (k > 0 && j <= cfg.sites[k - 1].interface_index)
      throw ConfigError("sites: interface indices must be strictly increasing");
  }
  if (!cfg.prescribed.empty() && cfg.prescribed.size() != cfg.sites.size())
    throw ConfigError("prescribed: need one signal per site (" +
                      std::to_string(cfg.prescribed.size()) + " signals, " +
                      std::to_string(cfg.sites.size()) + " sites)");
  for (const StepSignal& s : cfg.prescribed)
    if (s.values.empty() || s.times.size() != s.values.size())
      throw ConfigError("prescribed: times and values must be non-empty and equally long");
}

void compute_constraints(const SchemeConfig& cfg, const Array& rho, double t,
                         std::vector<double>& q) {
  q.resize(cfg.sites.size());
  if (!cfg.prescribed.empty()) {
    for (std::size_t k = 0; k < cfg.sites.size(); ++k) q[k] = cfg.prescribed[k](t);
    return;
  }
  for (std::size_t k = 0; k < cfg.sites.size(); ++k) {
    const ConstraintSite& s = cfg.sites[k];
    q[k] = eval_efficiency(s.efficiency, weighted_average(s, rho));
  }
}

// mult holds the speed multiplier sampled at every interface position.
void compute_fluxes(const Array& rho, const std::vector<double>& q, const SchemeConfig& cfg,
                    const FluxModel& model, const Array& mult, Array& flux) {
  const Index n = rho.size();
  const double v = model.v_max, sigma = 0.5 * model.rho_max, invR = 1.0 / model.rho_max;
  const double* r = rho.data();
  const double* m = mult.data();
  double* f = flux.data();
  f[0] = m[0] * godunov_unit(r[0], r[0], v, sigma, invR);  // free outflow: ghost copies rho[0]
  for (Index j = 1; j < n; ++j) f[j] = m[j] * godunov_unit(r[j - 1], r[j], v, sigma, invR);
  f[n] = m[n] * godunov_unit(r[n - 1], r[n - 1], v, sigma, invR);
  for (std::size_t k = 0; k < cfg.sites.size(); ++k) {
    const Index j = cfg.sites[k].interface_index;
    if (q[k] < f[j]) f[j] = q[k];
  }
}

Array interface_multipliers(const Grid& g, const FluxModel& model) {
  Array mult(g.n_cells + 1);
  for (Index j = 0; j <= g.n_cells; ++j) mult[j] = model.multiplier(g.interface_position(j));
  return mult;
}

}  // namespace

double StepSignal::operator()(double t) const {
  std::size_t i = 0;
  while (i + 1 < times.size() && t >= times[i + 1]) ++i;
  return values[i];
}

double godunov_flux(const FluxModel& model, double x, double a, double b) {
  if (!(a >= 0.0 && a <= model.rho_max) || !(b >= 0.0 && b <= model.rho_max))
    throw std::domain_error("godunov_flux: states (" + format_double(a) + ", " + format_double(b) +
                            ") outside [0, " + format_double(model.rho_max) + "]");
  return model.multiplier(x) *
         godunov_unit(a, b, model.v_max, 0.5 * model.rho_max, 1.0 / model.rho_max);
}

double cfl_max_dt(const Grid& g, const FluxModel& model) {
  if (!(model.v_max > 0.0))
    throw ConfigError("v_max: must be positive, got " + format_double(model.v_max));
  return g.dx / (2.0 * model.v_max);
}

Array interface_fluxes(const SimState& state, const SchemeConfig& cfg, const Grid& g,
                       const FluxModel& model) {
  check_scheme(cfg, g, model);
  if (state.rho.size() != g.n_cells)
    throw ConfigError("state: density has " + std::to_string(state.rho.size()) + " cells, grid " +
                      std::to_string(g.n_cells));
  std::vector<double> q;
  compute_constraints(cfg, state.rho, state.time, q);
  Array mult = interface_multipliers(g, model);
  Array flux(g.n_cells + 1);
  compute_fluxes(state.rho, q, cfg, model, mult, flux);
  return flux;
}

SimState step(const SimState& state, const SchemeConfig& cfg, const Grid& g,
              const FluxModel& model) {
  check_scheme(cfg, g, model);
  if (state.rho.size() != g.n_cells)
    throw ConfigError("state: density has " + std::to_string(state.rho.size()) + " cells, grid " +
                      std::to_string(g.n_cells));
  SimState next = state;
  compute_constraints(cfg, state.rho, state.time, next.q_current);
  Array mult = interface_multipliers(g, model);
  Array flux(g.n_cells + 1);
  compute_fluxes(state.rho, next.q_current, cfg, model, mult, flux);
  const double r = cfg.dt / g.dx;
  for (Index j = 0; j < g.n_cells; ++j) next.rho[j] = state.rho[j] - r * (flux[j + 1] - flux[j]);
  next.step = state.step + 1;
  next.time = static_cast<double>(next.step) * cfg.dt;
  return next;
}

SimOutput run(const SchemeConfig& cfg, const Grid& g, const FluxModel& model,
              const InitialDatum& datum, const RunOptions& opt) {
  check_scheme(cfg, g, model);
  ScopedFlushDenormals flush_mode;
  const Index n = g.n_cells;
  const double dt = cfg.dt, dx = g.dx;
  const double r = dt / dx;

  Array rho = project_datum(g, datum);
  Array mult = interface_multipliers(g, model);
  Array flux(n + 1);

  const Index exit_iface = cfg.sites.empty() ? n : cfg.sites.back().interface_index;
  const Index exit_cell = exit_iface > 0 ? exit_iface - 1 : 0;

  const auto n_end = static_cast<long>(std::llround(cfg.t_end / dt));

  // Snapshot times map to their nearest step; times beyond the horizon are
  // unreachable and simply stay absent from the output.
  std::multimap<long, double> snapshot_steps;
  long last_snapshot_step = -1;
  for (double t : opt.snapshot_times) {
    const auto target = static_cast<long>(std::llround(t / dt));
    if (target < 0 || target > n_end) continue;
    snapshot_steps.emplace(target, t);
    last_snapshot_step = std::max(last_snapshot_step, target);
  }

  SimOutput out;
  const double mass_total0 = dx * rho.sum();
  const double mass_scale = std::max(1.0, mass_total0);
  double mass_left = dx * rho.head(exit_iface).sum();
  out.initial_mass_left = mass_left;

  std::vector<double> q;
  out.q_history.assign(cfg.sites.size(), {});
  long n_step = 0;
  long evac_step = -1;

  for (;;) {
    compute_constraints(cfg, rho, static_cast<double>(n_step) * dt, q);

    if (opt.record_timeseries) {
      out.times.push_back(static_cast<double>(n_step) * dt);
      for (std::size_t k = 0; k < q.size(); ++k) out.q_history[k].push_back(q[k]);
      out.exit_trace.push_back(rho[exit_cell]);
      out.mass_history.push_back(mass_left);
    }
    for (auto [it, end] = snapshot_steps.equal_range(n_step); it != end; ++it)
      out.snapshots.emplace(it->second, rho);

    if (evac_step < 0 && mass_left <= opt.evac_threshold) evac_step = n_step;

    if (n_step >= n_end) break;
    if (opt.stop_at_evacuation && evac_step >= 0 && n_step >= last_snapshot_step) break;

    compute_fluxes(rho, q, cfg, model, mult, flux);

    // Conservative update, with the mass balance and the density bounds
    // audited in the same pass (compensated sum of the stored increments).
    KahanSum delta;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Index j = 0; j < n; ++j) {
      const double old = rho[j];
      const double next = old - r * (flux[j + 1] - flux[j]);
      rho[j] = next;
      delta.add(next - old);
      lo = next < lo ? next : lo;
      hi = next > hi ? next : hi;
    }
    const double residual = std::abs(delta.value() + r * (flux[n] - flux[0])) * dx / mass_scale;
    if (residual > out.max_conservation_residual) out.max_conservation_residual = residual;
    const double overshoot = std::max({hi - model.rho_max, -lo, 0.0});
    if (overshoot > out.max_density_overshoot) out.max_density_overshoot = overshoot;

    // Telescoped balance of the cells left of the exit; exact up to rounding.
    mass_left -= dt * (flux[exit_iface] - flux[0]);
    ++n_step;
  }

  out.steps = n_step;
  out.final_time = static_cast<double>(n_step) * dt;
  out.final_mass_left = mass_left;
  out.final_rho = std::move(rho);
  if (evac_step >= 0) out.evacuation_time = static_cast<double>(evac_step) * dt;
  return out;
}

}  // namespace cfv
