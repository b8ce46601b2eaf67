#include "cfv/model.hpp"

#include <cmath>
#include <stdexcept>

#include "cfv/util.hpp"

namespace cfv {

double eval_flux(const FluxModel& model, double x, double rho) {
  if (!(rho >= 0.0 && rho <= model.rho_max))
    throw std::domain_error("eval_flux: rho = " + format_double(rho) + " outside [0, " +
                            format_double(model.rho_max) + "]");
  return model.multiplier(x) * model.v_max * rho * (1.0 - rho / model.rho_max);
}

std::vector<std::string> efficiency_errors(const EfficiencyFunction& p) {
  std::vector<std::string> errs;
  if (p.levels.empty()) errs.push_back("levels: must not be empty");
  if (p.kind == EfficiencyFunction::Kind::PiecewiseLinear) {
    if (p.levels.size() != 2 || p.breakpoints.size() != 2)
      errs.push_back("piecewise_linear needs exactly 2 levels and 2 breakpoints");
  } else if (p.levels.size() != p.breakpoints.size() + 1) {
    errs.push_back("piecewise_constant needs levels.size() == breakpoints.size() + 1");
  }
  for (std::size_t i = 0; i < p.levels.size(); ++i) {
    if (!(p.levels[i] > 0.0)) errs.push_back("levels[" + std::to_string(i) + "]: must be positive");
    if (i > 0 && p.levels[i] > p.levels[i - 1])
      errs.push_back("levels: must be non-increasing (levels[" + std::to_string(i) + "] rises)");
  }
  for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
    if (!(p.breakpoints[i] > 0.0 && p.breakpoints[i] < 1.0))
      errs.push_back("breakpoints[" + std::to_string(i) + "]: must lie strictly inside (0, 1)");
    if (i > 0 && !(p.breakpoints[i] > p.breakpoints[i - 1]))
      errs.push_back("breakpoints: must be strictly increasing");
  }
  if (!(p.beta > 0.0)) errs.push_back("beta: must be positive");
  if (!(p.amplification > 0.0)) errs.push_back("amplification: must be positive");
  return errs;
}

double eval_efficiency(const EfficiencyFunction& p, double xi) {
  xi = clamp01(clamp01(xi) * p.beta);
  double value;
  if (p.kind == EfficiencyFunction::Kind::PiecewiseLinear) {
    const double p0 = p.levels[0], p1 = p.levels[1];
    const double x1 = p.breakpoints[0], x2 = p.breakpoints[1];
    if (xi < x1)
      value = p0;
    else if (xi >= x2)
      value = p1;
    else
      value = ((p0 - p1) * xi + p1 * x1 - p0 * x2) / (x1 - x2);
  } else {
    std::size_t i = 0;
    while (i < p.breakpoints.size() && xi >= p.breakpoints[i]) ++i;
    value = p.levels[i];
  }
  return p.amplification * value;
}

double eval_weight(const WeightFunction& w, double x) {
  const double left = w.anchor - w.support_width;
  if (x < left || x > w.anchor) return 0.0;
  return 2.0 * (x - left) / (w.support_width * w.support_width);
}

double InitialDatum::mass() const {
  double m = 0.0;
  for (const Block& b : blocks) m += (b.right - b.left) * b.level;
  return m;
}

HypothesisReport validate_hypotheses(const FluxModel& model, const EfficiencyFunction& p,
                                     const WeightFunction& w, double site_position) {
  HypothesisReport rep;

  // Flux: positive parameters, zero at both ends, single interior maximum.
  rep.flux_ok = model.v_max > 0.0 && model.rho_max > 0.0 && model.multiplier.half_width > 0.0 &&
                model.multiplier.min_factor > 0.0 && model.multiplier.min_factor <= 1.0;
  if (rep.flux_ok) {
    const int n = 1000;
    const double sigma = model.critical_density();
    double prev = eval_flux(model, site_position, 0.0);
    if (std::abs(prev) > 1e-14) rep.flux_ok = false;
    for (int i = 1; i <= n && rep.flux_ok; ++i) {
      double rho = model.rho_max * static_cast<double>(i) / n;
      double f = eval_flux(model, site_position, rho);
      if (rho <= sigma ? f < prev - 1e-12 : f > prev + 1e-12) rep.flux_ok = false;
      prev = f;
    }
    if (rep.flux_ok && std::abs(prev) > 1e-14) rep.flux_ok = false;
  }
  if (!rep.flux_ok) rep.failures.push_back("flux: not a bell shape with positive parameters");

  // Weight: positive width, non-decreasing on its support, unit integral
  // (trapezoid rule is exact for the affine ramp).
  rep.weight_ok = w.support_width > 0.0;
  if (rep.weight_ok) {
    const int n = 4000;
    double integral = 0.0;
    double prev = eval_weight(w, w.anchor - w.support_width);
    for (int i = 1; i <= n; ++i) {
      double x = w.anchor - w.support_width + w.support_width * static_cast<double>(i) / n;
      double wx = eval_weight(w, x);
      if (wx < prev - 1e-12) rep.weight_ok = false;
      integral += 0.5 * (prev + wx) * (w.support_width / n);
      prev = wx;
    }
    if (std::abs(integral - 1.0) > 1e-9) rep.weight_ok = false;
  }
  if (!rep.weight_ok) rep.failures.push_back("weight: not a normalized non-decreasing ramp");

  // Efficiency: structurally sound, non-increasing, and within the local flux
  // capacity at the constraint (0 < p <= f(sigma)).
  rep.efficiency_ok = efficiency_errors(p).empty();
  if (rep.efficiency_ok) {
    const int n = 2000;
    const double cap = model.max_flux(site_position);
    double prev = eval_efficiency(p, 0.0);
    for (int i = 0; i <= n && rep.efficiency_ok; ++i) {
      double xi = static_cast<double>(i) / n;
      double v = eval_efficiency(p, xi);
      if (!(v > 0.0) || v > prev + 1e-12 || v > cap + 1e-12) rep.efficiency_ok = false;
      prev = v;
    }
  }
  if (!rep.efficiency_ok)
    rep.failures.push_back(
        "efficiency: must be positive, non-increasing and bounded by the flux capacity " +
        format_double(model.max_flux(site_position)) + " at the constraint");

  return rep;
}

}  // namespace cfv
