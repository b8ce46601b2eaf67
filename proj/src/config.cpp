#include "cfv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cfv/util.hpp"
#include "json.hpp"

namespace cfv {

using nlohmann::json;

namespace {

// Collects every problem before failing, so a bad config reports all at once.
struct ErrorList {
  std::vector<std::string> errs;

  void add(const std::string& path, const std::string& what) { errs.push_back(path + ": " + what); }
  void raise_if_any(const std::string& origin) const {
    if (errs.empty()) return;
    std::string msg = "invalid config " + origin + ":";
    for (const std::string& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
};

double require_number(const json& j, const std::string& path, const char* key, ErrorList& errs,
                      double fallback = 0.0) {
  if (!j.contains(key)) {
    errs.add(path + "." + key, "missing");
    return fallback;
  }
  if (!j[key].is_number()) {
    errs.add(path + "." + key, "must be a number");
    return fallback;
  }
  return j[key].get<double>();
}

double optional_number(const json& j, const std::string& path, const char* key, double fallback,
                       ErrorList& errs) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    errs.add(path + "." + key, "must be a number");
    return fallback;
  }
  return j[key].get<double>();
}

std::vector<double> number_array(const json& j, const std::string& path, ErrorList& errs) {
  std::vector<double> out;
  if (!j.is_array()) {
    errs.add(path, "must be an array of numbers");
    return out;
  }
  for (const auto& v : j) {
    if (!v.is_number()) {
      errs.add(path, "must contain only numbers");
      return {};
    }
    out.push_back(v.get<double>());
  }
  return out;
}

EfficiencyFunction parse_efficiency(const json& j, const std::string& path, ErrorList& errs) {
  EfficiencyFunction p;
  if (!j.is_object()) {
    errs.add(path, "must be an object");
    return p;
  }
  std::string kind = j.value("kind", std::string{});
  if (kind == "piecewise_constant")
    p.kind = EfficiencyFunction::Kind::PiecewiseConstant;
  else if (kind == "piecewise_linear")
    p.kind = EfficiencyFunction::Kind::PiecewiseLinear;
  else
    errs.add(path + ".kind", "must be \"piecewise_constant\" or \"piecewise_linear\"");
  if (j.contains("levels")) p.levels = number_array(j["levels"], path + ".levels", errs);
  else errs.add(path + ".levels", "missing");
  if (j.contains("breakpoints"))
    p.breakpoints = number_array(j["breakpoints"], path + ".breakpoints", errs);
  else errs.add(path + ".breakpoints", "missing");
  p.beta = optional_number(j, path, "beta", 1.0, errs);
  p.amplification = optional_number(j, path, "amplification", 1.0, errs);
  return p;
}

json efficiency_to_json(const EfficiencyFunction& p) {
  json j;
  j["kind"] = p.kind == EfficiencyFunction::Kind::PiecewiseLinear ? "piecewise_linear"
                                                                  : "piecewise_constant";
  j["levels"] = p.levels;
  j["breakpoints"] = p.breakpoints;
  if (p.beta != 1.0) j["beta"] = p.beta;
  if (p.amplification != 1.0) j["amplification"] = p.amplification;
  return j;
}

}  // namespace

const char* sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::VMax: return "v_max";
    case SweepParameter::ObstaclePosition: return "obstacle_position";
    case SweepParameter::SlowZoneMinFactor: return "slow_zone_min_factor";
    case SweepParameter::SlowZoneCenter: return "slow_zone_center";
    case SweepParameter::EfficiencyBeta: return "efficiency_beta";
    case SweepParameter::DatumScale: return "datum_scale";
  }
  return "?";
}

std::optional<SweepParameter> sweep_parameter_from_name(const std::string& name) {
  for (SweepParameter p :
       {SweepParameter::VMax, SweepParameter::ObstaclePosition, SweepParameter::SlowZoneMinFactor,
        SweepParameter::SlowZoneCenter, SweepParameter::EfficiencyBeta, SweepParameter::DatumScale})
    if (name == sweep_parameter_name(p)) return p;
  return std::nullopt;
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid config " + origin + ": " + e.what());
  }

  ErrorList errs;
  ScenarioConfig cfg;

  if (j.contains("domain") && j["domain"].is_object()) {
    cfg.x_left = require_number(j["domain"], "domain", "x_left", errs);
    cfg.x_right = require_number(j["domain"], "domain", "x_right", errs);
  } else {
    errs.add("domain", "missing object with x_left, x_right");
  }
  cfg.dx = require_number(j, "", "dx", errs, 1.0);
  cfg.dt = require_number(j, "", "dt", errs, 1.0);
  cfg.t_end = require_number(j, "", "t_end", errs);
  cfg.evac_threshold = optional_number(j, "", "evac_threshold", 1e-3, errs);

  if (j.contains("flux") && j["flux"].is_object()) {
    const json& jf = j["flux"];
    cfg.flux.v_max = require_number(jf, "flux", "v_max", errs, 1.0);
    cfg.flux.rho_max = optional_number(jf, "flux", "rho_max", 1.0, errs);
    if (jf.contains("slow_zone")) {
      const json& jz = jf["slow_zone"];
      if (!jz.is_object()) {
        errs.add("flux.slow_zone", "must be an object");
      } else {
        cfg.flux.multiplier = SpeedProfile::slow_zone(
            require_number(jz, "flux.slow_zone", "center", errs),
            require_number(jz, "flux.slow_zone", "min_factor", errs, 1.0),
            optional_number(jz, "flux.slow_zone", "half_width", 0.5, errs));
      }
    }
  } else {
    errs.add("flux", "missing object with v_max");
  }

  if (j.contains("sites") && j["sites"].is_array()) {
    for (std::size_t k = 0; k < j["sites"].size(); ++k) {
      const std::string path = "sites[" + std::to_string(k) + "]";
      const json& js = j["sites"][k];
      if (!js.is_object()) {
        errs.add(path, "must be an object");
        continue;
      }
      SiteSpec s;
      s.position = require_number(js, path, "position", errs);
      s.weight_support = optional_number(js, path, "weight_support", 1.0, errs);
      if (js.contains("efficiency"))
        s.efficiency = parse_efficiency(js["efficiency"], path + ".efficiency", errs);
      else
        errs.add(path + ".efficiency", "missing");
      cfg.sites.push_back(std::move(s));
    }
  } else {
    errs.add("sites", "missing array");
  }

  if (j.contains("datum") && j["datum"].is_object() && j["datum"].contains("blocks") &&
      j["datum"]["blocks"].is_array()) {
    for (std::size_t k = 0; k < j["datum"]["blocks"].size(); ++k) {
      const std::string path = "datum.blocks[" + std::to_string(k) + "]";
      const json& jb = j["datum"]["blocks"][k];
      InitialDatum::Block b;
      b.left = require_number(jb, path, "left", errs);
      b.right = require_number(jb, path, "right", errs);
      b.level = require_number(jb, path, "level", errs);
      cfg.datum.blocks.push_back(b);
    }
  } else {
    errs.add("datum", "missing object with a blocks array");
  }

  if (j.contains("snapshot_times"))
    cfg.snapshot_times = number_array(j["snapshot_times"], "snapshot_times", errs);

  if (j.contains("sweep")) {
    const json& jw = j["sweep"];
    if (!jw.is_object()) {
      errs.add("sweep", "must be an object");
    } else {
      SweepSpec spec;
      std::string name = jw.value("parameter", std::string{});
      if (auto p = sweep_parameter_from_name(name)) {
        spec.parameter = *p;
      } else {
        errs.add("sweep.parameter", "unknown parameter \"" + name + "\"");
      }
      if (jw.contains("segments") && jw["segments"].is_array() && !jw["segments"].empty()) {
        for (std::size_t k = 0; k < jw["segments"].size(); ++k) {
          const std::string path = "sweep.segments[" + std::to_string(k) + "]";
          const json& jg = jw["segments"][k];
          SweepSegment seg;
          seg.start = require_number(jg, path, "start", errs);
          seg.stop = require_number(jg, path, "stop", errs);
          seg.step = require_number(jg, path, "step", errs, 1.0);
          spec.segments.push_back(seg);
        }
      } else {
        errs.add("sweep.segments", "missing non-empty array");
      }
      if (jw.contains("trace_velocities"))
        spec.trace_velocities =
            number_array(jw["trace_velocities"], "sweep.trace_velocities", errs);
      cfg.sweep = std::move(spec);
    }
  }

  errs.raise_if_any(origin);
  for (const std::string& e : validate_scenario(cfg)) errs.errs.push_back(e);
  errs.raise_if_any(origin);
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["domain"] = {{"x_left", cfg.x_left}, {"x_right", cfg.x_right}};
  j["dx"] = cfg.dx;
  j["dt"] = cfg.dt;
  j["t_end"] = cfg.t_end;
  j["evac_threshold"] = cfg.evac_threshold;
  j["flux"] = {{"v_max", cfg.flux.v_max}, {"rho_max", cfg.flux.rho_max}};
  if (cfg.flux.multiplier.kind == SpeedProfile::Kind::SlowZone)
    j["flux"]["slow_zone"] = {{"center", cfg.flux.multiplier.center},
                              {"min_factor", cfg.flux.multiplier.min_factor},
                              {"half_width", cfg.flux.multiplier.half_width}};
  j["sites"] = json::array();
  for (const SiteSpec& s : cfg.sites)
    j["sites"].push_back({{"position", s.position},
                          {"weight_support", s.weight_support},
                          {"efficiency", efficiency_to_json(s.efficiency)}});
  j["datum"]["blocks"] = json::array();
  for (const auto& b : cfg.datum.blocks)
    j["datum"]["blocks"].push_back({{"left", b.left}, {"right", b.right}, {"level", b.level}});
  if (!cfg.snapshot_times.empty()) j["snapshot_times"] = cfg.snapshot_times;
  if (cfg.sweep) {
    json jw;
    jw["parameter"] = sweep_parameter_name(cfg.sweep->parameter);
    jw["segments"] = json::array();
    for (const SweepSegment& seg : cfg.sweep->segments)
      jw["segments"].push_back({{"start", seg.start}, {"stop", seg.stop}, {"step", seg.step}});
    if (!cfg.sweep->trace_velocities.empty()) jw["trace_velocities"] = cfg.sweep->trace_velocities;
    j["sweep"] = std::move(jw);
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg, bool gate_hypotheses) {
  std::vector<std::string> errs;
  auto add = [&](const std::string& path, const std::string& what) {
    errs.push_back(path + ": " + what);
  };

  Grid grid;
  bool have_grid = false;
  try {
    grid = build_grid(cfg.x_left, cfg.x_right, cfg.dx);
    have_grid = true;
  } catch (const ConfigError& e) {
    errs.push_back(e.what());
  }

  if (!(cfg.t_end >= 0.0)) add("t_end", "must be non-negative");
  if (!(cfg.evac_threshold >= 0.0)) add("evac_threshold", "must be non-negative");
  if (!(cfg.flux.v_max > 0.0)) add("flux.v_max", "must be positive");
  if (!(cfg.flux.rho_max > 0.0)) add("flux.rho_max", "must be positive");
  if (cfg.flux.multiplier.kind == SpeedProfile::Kind::SlowZone) {
    if (!(cfg.flux.multiplier.min_factor > 0.0 && cfg.flux.multiplier.min_factor <= 1.0))
      add("flux.slow_zone.min_factor", "must lie in (0, 1]");
    if (!(cfg.flux.multiplier.half_width > 0.0)) add("flux.slow_zone.half_width", "must be positive");
  }

  if (have_grid && cfg.flux.v_max > 0.0 && cfg.dt > 0.0) {
    const double dt_max = cfl_max_dt(grid, cfg.flux);
    if (cfg.dt > dt_max * (1.0 + 1e-12))
      add("dt", "CFL violated: dt = " + format_double(cfg.dt) + " exceeds dx / (2 v_max) = " +
                    format_double(dt_max));
  } else if (!(cfg.dt > 0.0)) {
    add("dt", "must be positive");
  }

  for (std::size_t k = 0; k < cfg.sites.size(); ++k) {
    const std::string path = "sites[" + std::to_string(k) + "]";
    const SiteSpec& s = cfg.sites[k];
    if (!(s.position > cfg.x_left && s.position < cfg.x_right))
      add(path + ".position", format_double(s.position) + " outside the open domain (" +
                                  format_double(cfg.x_left) + ", " + format_double(cfg.x_right) +
                                  ")");
    if (!(s.weight_support > 0.0)) add(path + ".weight_support", "must be positive");
    for (const std::string& e : efficiency_errors(s.efficiency)) add(path + ".efficiency", e);
    if (gate_hypotheses && efficiency_errors(s.efficiency).empty() && cfg.flux.v_max > 0.0 &&
        cfg.flux.rho_max > 0.0) {
      const double cap = cfg.flux.max_flux(s.position);
      const double p0 = eval_efficiency(s.efficiency, 0.0);
      if (p0 > cap + 1e-12)
        add(path + ".efficiency",
            "peak value " + format_double(p0) + " exceeds the local flux capacity " +
                format_double(cap) + " (constraint can never bind; hypothesis violation)");
    }
  }
  if (have_grid) {
    std::vector<Index> snapped;
    for (const SiteSpec& s : cfg.sites) snapped.push_back(locate_interface(grid, s.position));
    std::sort(snapped.begin(), snapped.end());
    if (std::adjacent_find(snapped.begin(), snapped.end()) != snapped.end())
      add("sites", "two sites snap to the same interface");
  }

  std::vector<InitialDatum::Block> blocks = cfg.datum.blocks;
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.left < b.left; });
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const std::string path = "datum.blocks[" + std::to_string(k) + "]";
    if (!(blocks[k].right > blocks[k].left)) add(path, "needs right > left");
    if (!(blocks[k].level >= 0.0 && blocks[k].level <= cfg.flux.rho_max))
      add(path + ".level", format_double(blocks[k].level) + " outside [0, rho_max]");
    if (k > 0 && blocks[k].left < blocks[k - 1].right - 1e-12) add(path, "overlaps previous block");
    if (blocks[k].left < cfg.x_left - 1e-12 || blocks[k].right > cfg.x_right + 1e-12)
      add(path, "extends outside the domain");
  }

  if (cfg.sweep) {
    const SweepSpec& sw = *cfg.sweep;
    for (std::size_t k = 0; k < sw.segments.size(); ++k) {
      const std::string path = "sweep.segments[" + std::to_string(k) + "]";
      if (!(sw.segments[k].step > 0.0)) add(path + ".step", "must be positive");
      if (!(sw.segments[k].stop >= sw.segments[k].start)) add(path, "needs stop >= start");
    }
    if ((sw.parameter == SweepParameter::SlowZoneMinFactor ||
         sw.parameter == SweepParameter::SlowZoneCenter) &&
        cfg.flux.multiplier.kind != SpeedProfile::Kind::SlowZone)
      add("sweep.parameter", std::string(sweep_parameter_name(sw.parameter)) +
                                 " needs flux.slow_zone to be configured");
    if (sw.parameter == SweepParameter::ObstaclePosition && cfg.sites.size() < 2)
      add("sweep.parameter", "obstacle_position needs at least two sites (obstacle and exit)");
    if (!sw.trace_velocities.empty() && sw.parameter != SweepParameter::VMax)
      add("sweep.trace_velocities", "only meaningful for v_max sweeps");
  }

  return errs;
}

BuiltScenario build_scenario(const ScenarioConfig& cfg, bool gate_hypotheses) {
  ErrorList errs;
  errs.errs = validate_scenario(cfg, gate_hypotheses);
  errs.raise_if_any("<scenario>");

  BuiltScenario built;
  built.grid = build_grid(cfg.x_left, cfg.x_right, cfg.dx);
  built.model = cfg.flux;
  built.datum = cfg.datum;
  built.scheme.dt = cfg.dt;
  built.scheme.t_end = cfg.t_end;
  built.options.evac_threshold = cfg.evac_threshold;
  built.options.snapshot_times = cfg.snapshot_times;

  // Sites ordered by position so the exit (rightmost) is sites.back().
  std::vector<SiteSpec> ordered = cfg.sites;
  std::sort(ordered.begin(), ordered.end(),
            [](const SiteSpec& a, const SiteSpec& b) { return a.position < b.position; });
  for (const SiteSpec& s : ordered) {
    SiteBuildInfo info;
    built.scheme.sites.push_back(
        make_constraint_site(built.grid, s.position, s.efficiency, s.weight_support, &info));
    built.site_infos.push_back(info);
  }
  return built;
}

ScenarioConfig apply_parameter(ScenarioConfig cfg, SweepParameter parameter, double value) {
  switch (parameter) {
    case SweepParameter::VMax:
      cfg.flux.v_max = value;
      break;
    case SweepParameter::ObstaclePosition: {
      if (cfg.sites.size() < 2)
        throw ConfigError("obstacle_position: needs at least two sites (obstacle and exit)");
      auto obstacle = std::min_element(
          cfg.sites.begin(), cfg.sites.end(),
          [](const SiteSpec& a, const SiteSpec& b) { return a.position < b.position; });
      obstacle->position = value;
      break;
    }
    case SweepParameter::SlowZoneMinFactor:
      if (cfg.flux.multiplier.kind != SpeedProfile::Kind::SlowZone)
        throw ConfigError("slow_zone_min_factor: scenario has no slow zone");
      cfg.flux.multiplier.min_factor = value;
      break;
    case SweepParameter::SlowZoneCenter:
      if (cfg.flux.multiplier.kind != SpeedProfile::Kind::SlowZone)
        throw ConfigError("slow_zone_center: scenario has no slow zone");
      cfg.flux.multiplier.center = value;
      break;
    case SweepParameter::EfficiencyBeta: {
      if (cfg.sites.empty()) throw ConfigError("efficiency_beta: scenario has no sites");
      auto exit = std::max_element(
          cfg.sites.begin(), cfg.sites.end(),
          [](const SiteSpec& a, const SiteSpec& b) { return a.position < b.position; });
      exit->efficiency.beta = value;
      break;
    }
    case SweepParameter::DatumScale:
      for (auto& b : cfg.datum.blocks) b.level *= value;
      break;
  }
  return cfg;
}

}  // namespace cfv
