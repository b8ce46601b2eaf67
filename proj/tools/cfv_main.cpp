// Command-line front end: runs single scenarios, parameter sweeps, the
// self-convergence study and the property suite from JSON config files.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfv/config.hpp"
#include "cfv/experiments.hpp"
#include "cfv/io.hpp"
#include "cfv/scheme.hpp"
#include "cfv/util.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  int workers = 1;
  std::optional<double> threshold;
  std::vector<std::string> overrides;  // parameter=value pairs
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", args.config_path, "scenario config file (JSON)");
  if (needs_config) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--workers", args.workers, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", args.threshold, "override the evacuation mass threshold");
  cmd->add_option("--set", args.overrides,
                  "override a sweepable parameter, e.g. --set obstacle_position=-1.72");
}

cfv::ScenarioConfig load_scenario(const CommonArgs& args) {
  cfv::ScenarioConfig cfg = cfv::parse_config(args.config_path);
  for (const std::string& ov : args.overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw cfv::ConfigError("--set expects parameter=value, got \"" + ov + "\"");
    const std::string name = ov.substr(0, eq);
    const auto param = cfv::sweep_parameter_from_name(name);
    if (!param) throw cfv::ConfigError("--set: unknown parameter \"" + name + "\"");
    cfg = cfv::apply_parameter(cfg, *param, std::stod(ov.substr(eq + 1)));
  }
  if (args.threshold) cfg.evac_threshold = *args.threshold;
  return cfg;
}

fs::path prepare_out_dir(const CommonArgs& args) {
  fs::path dir(args.out_dir);
  fs::create_directories(dir);
  return dir;
}

void print_site_warnings(const cfv::BuiltScenario& built) {
  for (const cfv::SiteBuildInfo& info : built.site_infos)
    if (info.snap_warning)
      std::fprintf(stderr, "warning: site at %s snapped to %s (moved %s > dx/10)\n",
                   cfv::format_double(info.requested_position).c_str(),
                   cfv::format_double(info.snapped_position).c_str(),
                   cfv::format_double(info.snap_distance).c_str());
}

int cmd_run(const CommonArgs& args, bool snapshots_only) {
  const cfv::ScenarioConfig cfg = load_scenario(args);
  cfv::BuiltScenario built = cfv::build_scenario(cfg, /*gate_hypotheses=*/args.overrides.empty());
  print_site_warnings(built);
  built.options.record_timeseries = !snapshots_only;
  built.options.stop_at_evacuation = true;
  const cfv::SimOutput out =
      cfv::run(built.scheme, built.grid, built.model, built.datum, built.options);

  const fs::path dir = prepare_out_dir(args);
  if (!snapshots_only) cfv::write_timeseries_csv(dir / "timeseries.csv", out);
  for (const auto& [t, rho] : out.snapshots)
    cfv::write_snapshot_csv(dir / ("snapshot_" + cfv::snapshot_label(t) + ".csv"), built.grid, rho);

  if (out.evacuation_time)
    std::printf("evacuation_time %s\n", cfv::format_double(*out.evacuation_time).c_str());
  else
    std::printf("evacuation_time nan (threshold not crossed by t_end)\n");
  std::printf("final_time %s\nsteps %ld\nmass_left %s\n",
              cfv::format_double(out.final_time).c_str(), out.steps,
              cfv::format_double(out.final_mass_left).c_str());
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const cfv::ScenarioConfig cfg = load_scenario(args);
  if (!cfg.sweep) throw cfv::ConfigError("sweep: config has no sweep section");
  const fs::path dir = prepare_out_dir(args);

  const cfv::SweepSpec& spec = *cfg.sweep;
  cfv::SweepResult result;
  if (spec.parameter == cfv::SweepParameter::ObstaclePosition) {
    const cfv::BraessResult braess = cfv::run_braess(cfg, spec, args.workers);
    result = braess.sweep;
    std::printf("baseline_evacuation_time %s\n", cfv::format_double(braess.baseline).c_str());
    cfv::write_text_file(dir / "baseline.txt",
                         cfv::format_double(braess.baseline) + "\n");
  } else if (spec.parameter == cfv::SweepParameter::VMax && !spec.trace_velocities.empty()) {
    const cfv::FisResult fis = cfv::run_fis(cfg, spec, args.workers);
    result = fis.sweep;
    for (const auto& [v, trace] : fis.traces)
      cfv::write_trace_csv(dir / ("trace_v" + cfv::snapshot_label(v) + ".csv"), trace);
  } else {
    result = cfv::run_sweep(cfg, spec, args.workers);
  }

  cfv::write_sweep_csv(dir / "sweep.csv", result);
  if (const cfv::SweepRow* best = result.min_row())
    std::printf("min_evacuation_time %s at %s = %s\n",
                cfv::format_double(*best->evacuation_time).c_str(),
                cfv::sweep_parameter_name(spec.parameter),
                cfv::format_double(best->parameter).c_str());
  std::printf("rows %zu\n", result.rows.size());
  return 0;
}

int cmd_validate(const CommonArgs& args, int workers) {
  const cfv::ScenarioConfig cfg = load_scenario(args);
  const cfv::ValidationReport report = cfv::run_validation(cfg, workers);
  const fs::path dir = prepare_out_dir(args);
  cfv::write_text_file(dir / "report.json", cfv::validation_report_json(report));
  for (const cfv::ValidationRow& row : report.rows)
    std::printf("cells %ld dx %s error %s\n", static_cast<long>(row.n_cells),
                cfv::format_double(row.dx).c_str(), cfv::format_double(row.error).c_str());
  std::printf("order %s\n", cfv::format_double(report.order).c_str());
  return 0;
}

int cmd_properties(const CommonArgs& args, std::uint64_t seed) {
  const cfv::PropertyReport report = cfv::run_property_suite(seed, args.workers);
  const fs::path dir = prepare_out_dir(args);
  cfv::write_text_file(dir / "report.json", cfv::properties_report_json(report));
  for (const cfv::PropertyCheck& c : report.checks)
    std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume solver for corridor evacuation with constrained exits"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, validate_args, props_args, snap_args;
  std::uint64_t seed = 42;

  auto* run_cmd = app.add_subcommand("run", "run one scenario, write time series and snapshots");
  add_common(run_cmd, run_args);
  auto* sweep_cmd = app.add_subcommand("sweep", "run the config's parameter sweep");
  add_common(sweep_cmd, sweep_args);
  auto* validate_cmd = app.add_subcommand("validate", "self-convergence study on nested grids");
  add_common(validate_cmd, validate_args);
  auto* props_cmd = app.add_subcommand("properties", "randomized solver property checks");
  add_common(props_cmd, props_args, /*needs_config=*/false);
  props_cmd->add_option("--seed", seed, "random seed");
  auto* snap_cmd = app.add_subcommand("emit-snapshots", "run one scenario, write snapshots only");
  add_common(snap_cmd, snap_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_args, false);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args);
    if (validate_cmd->parsed()) return cmd_validate(validate_args, validate_args.workers);
    if (props_cmd->parsed()) return cmd_properties(props_args, seed);
    if (snap_cmd->parsed()) return cmd_run(snap_args, true);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
