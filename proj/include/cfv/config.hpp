#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfv/grid.hpp"
#include "cfv/scheme.hpp"

namespace cfv {

// Parameters a sweep may vary. Names follow the JSON schema.
enum class SweepParameter {
  VMax,               // "v_max"
  ObstaclePosition,   // "obstacle_position": moves the leftmost site
  SlowZoneMinFactor,  // "slow_zone_min_factor"
  SlowZoneCenter,     // "slow_zone_center"
  EfficiencyBeta,     // "efficiency_beta": argument scaling of the exit efficiency
  DatumScale,         // "datum_scale": multiplies every datum level
};

const char* sweep_parameter_name(SweepParameter p);
std::optional<SweepParameter> sweep_parameter_from_name(const std::string& name);

struct SweepSegment {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
};

struct SweepSpec {
  SweepParameter parameter = SweepParameter::VMax;
  std::vector<SweepSegment> segments;
  std::vector<double> trace_velocities;  // extra recorded runs (v_max sweeps only)
};

struct SiteSpec {
  double position = 0.0;
  EfficiencyFunction efficiency;
  double weight_support = 1.0;
};

// A full scenario as described by one config file.
struct ScenarioConfig {
  double x_left = 0.0;
  double x_right = 1.0;
  double dx = 1.0;
  double dt = 1.0;
  double t_end = 0.0;
  double evac_threshold = 1e-3;
  FluxModel flux;
  std::vector<SiteSpec> sites;
  InitialDatum datum;
  std::vector<double> snapshot_times;
  std::optional<SweepSpec> sweep;
};

// Scenario compiled to solver inputs. Sites are sorted by interface index.
struct BuiltScenario {
  Grid grid;
  FluxModel model;
  SchemeConfig scheme;
  InitialDatum datum;
  RunOptions options;
  std::vector<SiteBuildInfo> site_infos;
};

// Parses and validates a JSON scenario. Throws ConfigError whose message
// lists every problem with its field path. See README for the schema.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Lossless JSON serialization of a scenario (numbers keep full precision).
std::string config_to_json(const ScenarioConfig& cfg);

// All semantic problems of a scenario: grid/CFL validity, site positions,
// efficiency structure, datum blocks, sweep axis applicability, and (when
// gate_hypotheses) the model hypotheses at each site. Empty if sound.
std::vector<std::string> validate_scenario(const ScenarioConfig& cfg, bool gate_hypotheses = true);

// Builds grid, sites and scheme config; throws ConfigError on any validation
// error. Sweep drivers rebuild per point with gate_hypotheses = false (the
// hypothesis gate applies to the base scenario; CFL is always enforced).
BuiltScenario build_scenario(const ScenarioConfig& cfg, bool gate_hypotheses = true);

// Returns a copy with one swept parameter changed. Throws ConfigError if the
// parameter does not apply (no slow zone, fewer than two sites, ...).
ScenarioConfig apply_parameter(ScenarioConfig cfg, SweepParameter parameter, double value);

}  // namespace cfv
