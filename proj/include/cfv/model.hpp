#pragma once

#include <string>
#include <vector>

namespace cfv {

// Space-dependent factor multiplying the free-flow speed. Either uniformly 1,
// or dipping linearly to min_factor at `center` and recovering to 1 at
// distance half_width (a localized slow stretch of the corridor).
struct SpeedProfile {
  enum class Kind { Uniform, SlowZone };

  Kind kind = Kind::Uniform;
  double center = 0.0;
  double min_factor = 1.0;
  double half_width = 0.5;

  static SpeedProfile uniform() { return {}; }
  static SpeedProfile slow_zone(double center, double min_factor, double half_width = 0.5) {
    return {Kind::SlowZone, center, min_factor, half_width};
  }

  // Normalized dip shape: 0 at the center, 1 outside, slope 1/half_width.
  double shape(double x) const {
    if (kind == Kind::Uniform) return 1.0;
    double u = (x < center ? center - x : x - center) / half_width;
    return u >= 1.0 ? 1.0 : u;
  }

  // Speed multiplier in [min_factor, 1].
  double operator()(double x) const {
    if (kind == Kind::Uniform) return 1.0;
    return min_factor + (1.0 - min_factor) * shape(x);
  }
};

// Bell-shaped density/flux relation f(x, rho) = m(x) * v_max * rho * (1 - rho/rho_max),
// strictly concave in rho with its maximum at rho = rho_max / 2.
struct FluxModel {
  double v_max = 1.0;
  double rho_max = 1.0;
  SpeedProfile multiplier{};

  double critical_density() const { return 0.5 * rho_max; }
  // f(x, critical_density): the local flux capacity.
  double max_flux(double x) const { return multiplier(x) * v_max * rho_max * 0.25; }
};

// Throws std::domain_error for rho outside [0, rho_max].
double eval_flux(const FluxModel& model, double x, double rho);

// Outflow efficiency p(xi): maximal flux admitted through a constraint as a
// function of the weighted upstream density xi in [0, 1]. Non-increasing.
//
// PiecewiseConstant: levels[i] on [breakpoints[i-1], breakpoints[i]), with
//   breakpoints[-1] = 0 and the last level extending to xi = 1 inclusive.
// PiecewiseLinear: exactly two levels / two breakpoints; levels[0] below
//   breakpoints[0], affine in between, levels[1] from breakpoints[1] on.
//
// `beta` rescales the argument (p(beta * xi)); `amplification` scales the value.
struct EfficiencyFunction {
  enum class Kind { PiecewiseConstant, PiecewiseLinear };

  Kind kind = Kind::PiecewiseConstant;
  std::vector<double> levels;
  std::vector<double> breakpoints;
  double beta = 1.0;
  double amplification = 1.0;
};

double eval_efficiency(const EfficiencyFunction& p, double xi);

// Structural problems (wrong arity, non-monotone levels, ...); empty if sound.
std::vector<std::string> efficiency_errors(const EfficiencyFunction& p);

// Averaging weight on [anchor - support_width, anchor]: affine ramp rising
// from 0 to 2/support_width at the anchor, unit integral, zero elsewhere.
struct WeightFunction {
  double support_width = 1.0;
  double anchor = 0.0;
};

double eval_weight(const WeightFunction& w, double x);

// Initial density as a list of disjoint constant blocks (zero elsewhere).
struct InitialDatum {
  struct Block {
    double left = 0.0;
    double right = 0.0;
    double level = 0.0;
  };
  std::vector<Block> blocks;

  double mass() const;
};

struct HypothesisReport {
  bool flux_ok = false;
  bool weight_ok = false;
  bool efficiency_ok = false;
  std::vector<std::string> failures;

  bool all_ok() const { return flux_ok && weight_ok && efficiency_ok; }
};

// Checks the standing assumptions of the model: bell-shaped flux, normalized
// non-decreasing weight, positive non-increasing efficiency bounded by the
// local flux capacity at the constraint position.
HypothesisReport validate_hypotheses(const FluxModel& model, const EfficiencyFunction& p,
                                     const WeightFunction& w, double site_position = 0.0);

}  // namespace cfv
