#include "cfv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfv/scheme.hpp"
#include "cfv/util.hpp"

namespace cfv {

namespace {

// Sweep-point runs drop recording and snapshots; only the evacuation time and
// the audit maxima are kept.
SimOutput run_point(const ScenarioConfig& cfg) {
  BuiltScenario built = build_scenario(cfg, /*gate_hypotheses=*/false);
  built.options.record_timeseries = false;
  built.options.snapshot_times.clear();
  return run(built.scheme, built.grid, built.model, built.datum, built.options);
}

}  // namespace

std::vector<double> sweep_points(const SweepSpec& spec) {
  std::vector<double> points;
  for (const SweepSegment& seg : spec.segments) {
    const double tol = seg.step * 1e-9;
    for (long k = 0;; ++k) {
      const double v = seg.start + static_cast<double>(k) * seg.step;
      if (v > seg.stop + tol) break;
      if (!points.empty() && std::abs(points.back() - v) <= tol) continue;
      points.push_back(v);
    }
  }
  return points;
}

const SweepRow* SweepResult::min_row() const {
  const SweepRow* best = nullptr;
  for (const SweepRow& row : rows)
    if (row.evacuation_time && (!best || *row.evacuation_time < *best->evacuation_time))
      best = &row;
  return best;
}

SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec, int workers) {
  const std::vector<double> points = sweep_points(spec);
  if (points.empty()) throw ConfigError("sweep: no points in the given segments");

  // Every point must be a valid scenario (CFL included) before any run starts.
  std::vector<ScenarioConfig> cfgs;
  cfgs.reserve(points.size());
  for (double v : points) {
    ScenarioConfig cfg = apply_parameter(base, spec.parameter, v);
    cfg.sweep.reset();
    cfg.snapshot_times.clear();
    const auto errs = validate_scenario(cfg, /*gate_hypotheses=*/false);
    if (!errs.empty()) {
      std::string msg = "sweep point " + std::string(sweep_parameter_name(spec.parameter)) + " = " +
                        format_double(v) + " is invalid:";
      for (const std::string& e : errs) msg += "\n  - " + e;
      throw ConfigError(msg);
    }
    cfgs.push_back(std::move(cfg));
  }

  SweepResult result;
  result.rows.resize(points.size());
  std::vector<double> overshoot(points.size(), 0.0), residual(points.size(), 0.0);
  parallel_for(points.size(), workers, [&](std::size_t i) {
    SimOutput out = run_point(cfgs[i]);
    result.rows[i] = SweepRow{points[i], out.evacuation_time};
    overshoot[i] = out.max_density_overshoot;
    residual[i] = out.max_conservation_residual;
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    result.max_density_overshoot = std::max(result.max_density_overshoot, overshoot[i]);
    result.max_conservation_residual = std::max(result.max_conservation_residual, residual[i]);
  }
  return result;
}

FisResult run_fis(const ScenarioConfig& base, const SweepSpec& spec, int workers) {
  FisResult result;
  result.sweep = run_sweep(base, spec, workers);
  for (double v : spec.trace_velocities) {
    ScenarioConfig cfg = apply_parameter(base, SweepParameter::VMax, v);
    cfg.sweep.reset();
    cfg.snapshot_times.clear();
    BuiltScenario built = build_scenario(cfg, /*gate_hypotheses=*/false);
    built.options.record_timeseries = true;
    SimOutput out = run(built.scheme, built.grid, built.model, built.datum, built.options);
    result.sweep.max_density_overshoot =
        std::max(result.sweep.max_density_overshoot, out.max_density_overshoot);
    result.sweep.max_conservation_residual =
        std::max(result.sweep.max_conservation_residual, out.max_conservation_residual);
    result.traces.emplace(v, TraceSeries{std::move(out.times), std::move(out.exit_trace)});
  }
  return result;
}

BraessResult run_braess(const ScenarioConfig& base, const SweepSpec& spec, int workers) {
  if (spec.parameter != SweepParameter::ObstaclePosition)
    throw ConfigError("run_braess: sweep parameter must be obstacle_position");
  if (base.sites.size() < 2)
    throw ConfigError("run_braess: scenario needs an obstacle site besides the exit");

  BraessResult result;
  result.sweep = run_sweep(base, spec, workers);

  ScenarioConfig no_obstacle = base;
  auto obstacle = std::min_element(
      no_obstacle.sites.begin(), no_obstacle.sites.end(),
      [](const SiteSpec& a, const SiteSpec& b) { return a.position < b.position; });
  no_obstacle.sites.erase(obstacle);
  no_obstacle.sweep.reset();
  no_obstacle.snapshot_times.clear();
  SimOutput out = run_point(no_obstacle);
  if (!out.evacuation_time)
    throw ConfigError("run_braess: baseline never crossed the evacuation threshold within t_end");
  result.baseline = *out.evacuation_time;
  result.sweep.max_density_overshoot =
      std::max(result.sweep.max_density_overshoot, out.max_density_overshoot);
  result.sweep.max_conservation_residual =
      std::max(result.sweep.max_conservation_residual, out.max_conservation_residual);
  return result;
}

SlowZoneResult run_slowzone(const ScenarioConfig& min_factor_cfg, const ScenarioConfig& center_cfg,
                            const ScenarioConfig& vmax_cfg, int workers) {
  auto sweep_of = [workers](const ScenarioConfig& cfg, SweepParameter expected) {
    if (!cfg.sweep || cfg.sweep->parameter != expected)
      throw ConfigError(std::string("run_slowzone: config must carry a ") +
                        sweep_parameter_name(expected) + " sweep");
    return run_sweep(cfg, *cfg.sweep, workers);
  };
  SlowZoneResult result;
  result.min_factor = sweep_of(min_factor_cfg, SweepParameter::SlowZoneMinFactor);
  result.center = sweep_of(center_cfg, SweepParameter::SlowZoneCenter);
  result.v_max = sweep_of(vmax_cfg, SweepParameter::VMax);
  return result;
}

ValidationReport run_validation(const ScenarioConfig& base, int workers, std::vector<Index> cells,
                                double error_time) {
  if (cells.size() < 4)
    throw ConfigError("run_validation: need at least 4 refinement levels");
  std::sort(cells.begin(), cells.end());
  const double ratio = base.dt / base.dx;  // dt/dx is held fixed across levels
  const double span = base.x_right - base.x_left;

  std::vector<ScenarioConfig> cfgs;
  for (Index n : cells) {
    ScenarioConfig cfg = base;
    cfg.dx = span / static_cast<double>(n);
    cfg.dt = ratio * cfg.dx;
    cfg.t_end = error_time;
    cfg.snapshot_times = {error_time};
    cfg.sweep.reset();
    const auto errs = validate_scenario(cfg, /*gate_hypotheses=*/false);
    if (!errs.empty()) {
      std::string msg = "validation level " + std::to_string(n) + " cells is invalid:";
      for (const std::string& e : errs) msg += "\n  - " + e;
      throw ConfigError(msg);
    }
    cfgs.push_back(std::move(cfg));
  }

  std::vector<Grid> grids(cells.size());
  std::vector<Array> fields(cells.size());
  ValidationReport report;
  report.reference_cells = cells.back();
  report.error_time = error_time;
  std::vector<double> overshoot(cells.size(), 0.0), residual(cells.size(), 0.0);

  parallel_for(cells.size(), workers, [&](std::size_t i) {
    BuiltScenario built = build_scenario(cfgs[i], /*gate_hypotheses=*/false);
    built.options.record_timeseries = false;
    built.options.stop_at_evacuation = false;
    SimOutput out = run(built.scheme, built.grid, built.model, built.datum, built.options);
    grids[i] = built.grid;
    fields[i] = out.snapshots.at(error_time);
    overshoot[i] = out.max_density_overshoot;
    residual[i] = out.max_conservation_residual;
  });

  for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
    ValidationRow row;
    row.n_cells = cells[i];
    row.dx = grids[i].dx;
    row.error = relative_l1_error(grids.back(), fields.back(), grids[i], fields[i]);
    report.rows.push_back(row);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    report.max_density_overshoot = std::max(report.max_density_overshoot, overshoot[i]);
    report.max_conservation_residual = std::max(report.max_conservation_residual, residual[i]);
  }
  std::vector<std::pair<double, double>> dx_err;
  for (const ValidationRow& row : report.rows) dx_err.emplace_back(row.dx, row.error);
  report.order = convergence_order(dx_err);
  return report;
}

bool PropertyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

namespace {

// Brute-force Godunov oracle: extremum of the flux over a dense grid spanning
// [min(a,b), max(a,b)], endpoints included. With 1e5 intervals the interior
// extremum is resolved to ~2.5e-11 of the closed form.
double godunov_oracle(const FluxModel& model, double x, double a, double b, int n_grid) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  double best = eval_flux(model, x, lo);
  for (int i = 1; i <= n_grid; ++i) {
    const double rho = lo + (hi - lo) * static_cast<double>(i) / n_grid;
    const double f = eval_flux(model, x, rho);
    if (a <= b ? f < best : f > best) best = f;
  }
  return best;
}

struct LockstepSetup {
  Grid grid;
  FluxModel model;
  SchemeConfig scheme;
  Array rho0;
};

// Small prescribed-mode problem shared by the stability and monotonicity
// checks: coarse version of the base corridor.
LockstepSetup make_lockstep_setup(const StepSignal& signal, const InitialDatum& datum) {
  LockstepSetup s;
  s.grid = build_grid(-6.0, 1.0, 0.02);
  s.model = FluxModel{};
  EfficiencyFunction p;
  p.kind = EfficiencyFunction::Kind::PiecewiseLinear;
  p.levels = {0.24, 0.05};
  p.breakpoints = {0.5, 0.9};
  s.scheme.dt = 0.004;
  s.scheme.t_end = 5.0;
  s.scheme.sites.push_back(make_constraint_site(s.grid, 0.0, p, 1.0));
  s.scheme.prescribed = {signal};
  s.rho0 = project_datum(s.grid, datum);
  return s;
}

StepSignal random_signal(Rng& rng, double t_end, double q_max) {
  StepSignal sig;
  std::vector<double> ts = {0.0};
  for (int i = 0; i < 4; ++i) ts.push_back(rng.uniform(0.0, t_end));
  std::sort(ts.begin(), ts.end());
  for (double t : ts) {
    sig.times.push_back(t);
    sig.values.push_back(rng.uniform(0.0, q_max));
  }
  return sig;
}

std::string pass_detail(double got, double bound, const char* relation) {
  return format_double(got) + " " + relation + " " + format_double(bound);
}

}  // namespace

PropertyReport run_property_suite(std::uint64_t seed, int workers) {
  PropertyReport report;
  report.seed = seed;
  Rng rng(seed);

  // -- Godunov closed form against the brute-force extremum oracle.
  {
    const FluxModel model{};
    const int pairs = 10000;
    double worst = 0.0;
    std::vector<std::pair<double, double>> ab(pairs);
    for (auto& [a, b] : ab) {
      a = rng.uniform();
      b = rng.uniform();
    }
    std::vector<double> errors(pairs, 0.0);
    parallel_for(pairs, workers, [&](std::size_t i) {
      const auto [a, b] = ab[i];
      errors[i] = std::abs(godunov_flux(model, 0.0, a, b) - godunov_oracle(model, 0.0, a, b, 100000));
    });
    worst = *std::max_element(errors.begin(), errors.end());
    report.checks.push_back({"godunov_matches_oracle", worst <= 1e-10,
                             "max |closed form - oracle| = " + pass_detail(worst, 1e-10, "<=")});
  }

  const InitialDatum base_datum{{{-5.75, -2.0, 1.0}}};

  // -- Identical prescribed signals: the two evolutions coincide exactly.
  {
    StepSignal sig = random_signal(rng, 5.0, 0.3);
    LockstepSetup s = make_lockstep_setup(sig, base_datum);
    SimState a{0, 0.0, s.rho0, {}}, b{0, 0.0, s.rho0, {}};
    const long n_steps = std::llround(s.scheme.t_end / s.scheme.dt);
    double diff = 0.0;
    for (long n = 0; n < n_steps; ++n) {
      a = step(a, s.scheme, s.grid, s.model);
      b = step(b, s.scheme, s.grid, s.model);
      diff += (a.rho - b.rho).abs().sum();
    }
    report.checks.push_back({"l1_stability_identical_signals", diff == 0.0,
                             "accumulated L1 difference = " + format_double(diff)});
  }

  // -- L1 stability in the prescribed signal: ||rho - rho_hat||_{L1(Q)} <=
  //    2 T ||q - q_hat||_{L1([0,T])} for every random pair.
  {
    const int pairs = 10;
    bool ok = true;
    std::string detail;
    std::vector<std::pair<StepSignal, StepSignal>> sigs;
    for (int i = 0; i < pairs; ++i)
      sigs.emplace_back(random_signal(rng, 5.0, 0.3), random_signal(rng, 5.0, 0.3));
    std::vector<double> lhs(pairs, 0.0), rhs(pairs, 0.0);
    parallel_for(pairs, workers, [&](std::size_t i) {
      LockstepSetup sa = make_lockstep_setup(sigs[i].first, base_datum);
      LockstepSetup sb = make_lockstep_setup(sigs[i].second, base_datum);
      SimState a{0, 0.0, sa.rho0, {}}, b{0, 0.0, sb.rho0, {}};
      const double dt = sa.scheme.dt, dx = sa.grid.dx;
      const long n_steps = std::llround(sa.scheme.t_end / dt);
      const double t_total = static_cast<double>(n_steps) * dt;
      double sum_rho = 0.0, sum_q = 0.0;
      for (long n = 0; n < n_steps; ++n) {
        sum_q += std::abs(sigs[i].first(static_cast<double>(n) * dt) -
                          sigs[i].second(static_cast<double>(n) * dt));
        a = step(a, sa.scheme, sa.grid, sa.model);
        b = step(b, sb.scheme, sb.grid, sb.model);
        sum_rho += (a.rho - b.rho).abs().sum();
      }
      lhs[i] = dt * dx * sum_rho;
      rhs[i] = 2.0 * t_total * dt * sum_q;
    });
    for (int i = 0; i < pairs; ++i) {
      if (lhs[i] > rhs[i] * (1.0 + 1e-12) + 1e-14) {
        ok = false;
        detail = "pair " + std::to_string(i) + ": " + pass_detail(lhs[i], rhs[i], ">");
        break;
      }
    }
    if (ok) detail = std::to_string(pairs) + " random signal pairs within the bound";
    report.checks.push_back({"l1_stability_randomized", ok, detail});
  }

  // -- Monotonicity: ordered data stay ordered under a common signal.
  {
    const int pairs = 10;
    bool ok = true;
    std::string detail;
    struct Case {
      StepSignal sig;
      InitialDatum lo, hi;
    };
    std::vector<Case> cases;
    for (int i = 0; i < pairs; ++i) {
      Case c;
      c.sig = random_signal(rng, 5.0, 0.3);
      const double a1 = rng.uniform(), a2 = rng.uniform();
      c.lo.blocks = {{-5.75, -4.0, a1}, {-3.5, -2.0, a2}};
      c.hi.blocks = {{-5.75, -4.0, a1 + (1.0 - a1) * rng.uniform()},
                     {-3.5, -2.0, a2 + (1.0 - a2) * rng.uniform()}};
      cases.push_back(std::move(c));
    }
    std::vector<double> worst(pairs, 0.0);
    parallel_for(pairs, workers, [&](std::size_t i) {
      LockstepSetup sl = make_lockstep_setup(cases[i].sig, cases[i].lo);
      LockstepSetup sh = make_lockstep_setup(cases[i].sig, cases[i].hi);
      SimState a{0, 0.0, sl.rho0, {}}, b{0, 0.0, sh.rho0, {}};
      const long n_steps = std::llround(sl.scheme.t_end / sl.scheme.dt);
      double w = (a.rho - b.rho).maxCoeff();
      for (long n = 0; n < n_steps; ++n) {
        a = step(a, sl.scheme, sl.grid, sl.model);
        b = step(b, sh.scheme, sh.grid, sh.model);
        w = std::max(w, (a.rho - b.rho).maxCoeff());
      }
      worst[i] = w;  // <= 0 when ordering is preserved
    });
    double w = *std::max_element(worst.begin(), worst.end());
    ok = w <= 1e-12;
    detail = "max ordering violation = " + pass_detail(w, 1e-12, "<=");
    report.checks.push_back({"monotone_in_datum", ok, detail});
  }

  // -- BV stability of the constraint signal under grid refinement.
  {
    ScenarioConfig coarse = fis_scenario();
    coarse.sweep.reset();
    coarse.snapshot_times.clear();
    ScenarioConfig fine = coarse;
    fine.dx = coarse.dx / 2.0;
    fine.dt = coarse.dt / 2.0;
    auto bv_of = [](const ScenarioConfig& cfg) {
      BuiltScenario built = build_scenario(cfg);
      built.options.record_timeseries = true;
      SimOutput out = run(built.scheme, built.grid, built.model, built.datum, built.options);
      return bv_norm(out.q_history.at(0));
    };
    const double bv_coarse = bv_of(coarse);
    const double bv_fine = bv_of(fine);
    const bool ok = bv_fine <= 2.0 * bv_coarse && bv_coarse > 0.0;
    report.checks.push_back({"bv_stable_under_refinement", ok,
                             "BV(q) " + format_double(bv_coarse) + " -> " + format_double(bv_fine) +
                                 " under dx/2 (allowed factor 2)"});
  }

  // -- Bounds and conservation audits of the bundled scenarios.
  {
    double worst_overshoot = 0.0, worst_residual = 0.0;
    for (const ScenarioConfig& cfg : {fis_scenario(), braess_scenario(), slowzone_scenario()}) {
      ScenarioConfig c = cfg;
      c.sweep.reset();
      c.snapshot_times.clear();
      BuiltScenario built = build_scenario(c);
      SimOutput out = run(built.scheme, built.grid, built.model, built.datum, built.options);
      worst_overshoot = std::max(worst_overshoot, out.max_density_overshoot);
      worst_residual = std::max(worst_residual, out.max_conservation_residual);
    }
    report.checks.push_back(
        {"density_bounds_audit", worst_overshoot <= 1e-12,
         "max distance outside [0, rho_max] = " + pass_detail(worst_overshoot, 1e-12, "<=")});
    report.checks.push_back(
        {"conservation_audit", worst_residual <= 1e-13,
         "max per-step mass balance residual = " + pass_detail(worst_residual, 1e-13, "<=")});
  }

  return report;
}

ScenarioConfig fis_scenario() {
  ScenarioConfig c;
  c.x_left = -6.0;
  c.x_right = 1.0;
  c.dx = 5e-3;
  c.dt = 5e-4;
  c.t_end = 400.0;
  c.evac_threshold = 1e-3;
  c.flux = FluxModel{};
  SiteSpec exit;
  exit.position = 0.0;
  exit.weight_support = 1.0;
  exit.efficiency.kind = EfficiencyFunction::Kind::PiecewiseLinear;
  exit.efficiency.levels = {0.24, 0.05};
  exit.efficiency.breakpoints = {0.5, 0.9};
  c.sites = {exit};
  c.datum.blocks = {{-5.75, -2.0, 1.0}};
  SweepSpec sweep;
  sweep.parameter = SweepParameter::VMax;
  sweep.segments = {{0.1, 0.8, 0.1}, {0.8, 1.2, 0.01}, {1.2, 5.0, 0.1}};
  sweep.trace_velocities = {0.95, 0.99, 1.0, 1.01, 1.05};
  c.sweep = sweep;
  return c;
}

ScenarioConfig braess_scenario() {
  ScenarioConfig c;
  c.x_left = -6.0;
  c.x_right = 1.0;
  c.dx = 5e-3;
  c.dt = 5e-4;
  c.t_end = 130.0;
  c.evac_threshold = 1e-3;
  c.flux = FluxModel{};
  SiteSpec exit;
  exit.position = 0.0;
  exit.weight_support = 1.0;
  exit.efficiency.kind = EfficiencyFunction::Kind::PiecewiseLinear;
  exit.efficiency.levels = {0.21, 0.1};
  exit.efficiency.breakpoints = {0.566, 0.731};
  SiteSpec obstacle = exit;  // same shape, 15% more permissive, placed upstream
  obstacle.position = -1.72;
  obstacle.efficiency.amplification = 1.15;
  c.sites = {exit, obstacle};
  c.datum.blocks = {{-5.75, -2.0, 1.0}};
  c.snapshot_times = {1.0, 7.0, 15.0, 19.0, 24.246};
  SweepSpec sweep;
  sweep.parameter = SweepParameter::ObstaclePosition;
  sweep.segments = {{-1.9, -0.01, 0.01}};
  c.sweep = sweep;
  return c;
}

ScenarioConfig slowzone_scenario(double min_factor, double center, double v_max) {
  ScenarioConfig c;
  c.x_left = -6.0;
  c.x_right = 1.0;
  c.dx = 5e-3;
  c.dt = 5e-4;
  c.t_end = 300.0;
  c.evac_threshold = 1e-3;
  c.flux.v_max = v_max;
  c.flux.rho_max = 1.0;
  c.flux.multiplier = SpeedProfile::slow_zone(center, min_factor, 0.5);
  SiteSpec exit;
  exit.position = 0.0;
  exit.weight_support = 1.0;
  exit.efficiency.kind = EfficiencyFunction::Kind::PiecewiseLinear;
  exit.efficiency.levels = {0.21, 0.1};
  exit.efficiency.breakpoints = {0.566, 0.731};
  c.sites = {exit};
  c.datum.blocks = {{-5.75, -2.0, 1.0}};
  return c;
}

ScenarioConfig validation_scenario() {
  ScenarioConfig c;
  c.x_left = -6.0;
  c.x_right = 1.0;
  c.dx = 3.5e-4;
  c.dt = 7e-5;
  c.t_end = 12.0;
  c.evac_threshold = 1e-3;
  c.flux = FluxModel{};
  SiteSpec exit;
  exit.position = 0.0;
  exit.weight_support = 1.0;
  exit.efficiency.kind = EfficiencyFunction::Kind::PiecewiseConstant;
  exit.efficiency.levels = {0.21, 0.168, 0.021};
  exit.efficiency.breakpoints = {0.566, 0.731};
  c.sites = {exit};
  c.datum.blocks = {{-5.75, -2.0, 1.0}};
  c.snapshot_times = {1.0, 7.325, 10.0, 11.939};
  return c;
}

}  // namespace cfv
