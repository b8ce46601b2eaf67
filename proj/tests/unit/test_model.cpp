#include <stdexcept>

#include "cfv/model.hpp"
#include "doctest.h"

using namespace cfv;

namespace {

EfficiencyFunction fis_efficiency() {
  EfficiencyFunction p;
  p.kind = EfficiencyFunction::Kind::PiecewiseLinear;
  p.levels = {0.24, 0.05};
  p.breakpoints = {0.5, 0.9};
  return p;
}

EfficiencyFunction staircase_efficiency() {
  EfficiencyFunction p;
  p.kind = EfficiencyFunction::Kind::PiecewiseConstant;
  p.levels = {0.21, 0.168, 0.021};
  p.breakpoints = {0.566, 0.731};
  return p;
}

}  // namespace

TEST_CASE("speed profile: uniform is identically one") {
  SpeedProfile u = SpeedProfile::uniform();
  CHECK(u(-3.0) == 1.0);
  CHECK(u(0.0) == 1.0);
  CHECK(u.shape(42.0) == 1.0);
}

TEST_CASE("speed profile: slow zone dips to min_factor and recovers linearly") {
  SpeedProfile z = SpeedProfile::slow_zone(-1.5, 0.88, 0.5);
  CHECK(z(-1.5) == doctest::Approx(0.88).epsilon(1e-15));
  CHECK(z(-1.25) == doctest::Approx(0.94).epsilon(1e-15));  // halfway up the ramp
  CHECK(z(-1.0) == 1.0);                                    // edge of the zone
  CHECK(z(-2.0) == 1.0);
  CHECK(z(0.0) == 1.0);   // far from the zone
  CHECK(z(-1.7) == z(-1.3));  // symmetric about the center
}

TEST_CASE("flux: bell shape, capacity, and domain guard") {
  FluxModel m;  // v_max = 1, rho_max = 1, uniform speed
  CHECK(eval_flux(m, 0.0, 0.0) == 0.0);
  CHECK(eval_flux(m, 0.0, 1.0) == 0.0);
  CHECK(eval_flux(m, 0.0, 0.3) == doctest::Approx(0.21).epsilon(1e-15));
  CHECK(eval_flux(m, 0.0, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.critical_density() == 0.5);
  CHECK(m.max_flux(0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(eval_flux(m, 0.0, -0.1), std::domain_error);
  CHECK_THROWS_AS(eval_flux(m, 0.0, 1.1), std::domain_error);
}

TEST_CASE("flux: slow zone scales the whole bell, vertex stays put") {
  FluxModel m;
  m.multiplier = SpeedProfile::slow_zone(-1.5, 0.88, 0.5);
  // At the zone center the capacity is scaled by min_factor.
  CHECK(eval_flux(m, -1.5, 0.5) == doctest::Approx(0.22).epsilon(1e-15));
  CHECK(m.max_flux(-1.5) == doctest::Approx(0.22).epsilon(1e-15));
  // Outside the zone nothing changes.
  CHECK(eval_flux(m, 0.0, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  // The argmax in rho is still the critical density: f(x, 0.5) >= f(x, r).
  for (double r : {0.1, 0.3, 0.49, 0.51, 0.7, 0.95})
    CHECK(eval_flux(m, -1.5, r) < eval_flux(m, -1.5, 0.5));
}

TEST_CASE("efficiency: piecewise linear evaluates the affine branch") {
  EfficiencyFunction p = fis_efficiency();
  CHECK(eval_efficiency(p, 0.0) == doctest::Approx(0.24).epsilon(1e-15));
  CHECK(eval_efficiency(p, 0.49) == doctest::Approx(0.24).epsilon(1e-15));
  CHECK(eval_efficiency(p, 0.5) == doctest::Approx(0.24).epsilon(1e-12));  // continuous at x1
  CHECK(eval_efficiency(p, 0.7) == doctest::Approx(0.145).epsilon(1e-12));
  CHECK(eval_efficiency(p, 0.9) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(eval_efficiency(p, 1.0) == doctest::Approx(0.05).epsilon(1e-15));
  // Arguments outside [0, 1] are clamped, not extrapolated.
  CHECK(eval_efficiency(p, -0.3) == eval_efficiency(p, 0.0));
  CHECK(eval_efficiency(p, 1.7) == eval_efficiency(p, 1.0));
}

TEST_CASE("efficiency: beta rescales the argument, amplification the value") {
  EfficiencyFunction p = fis_efficiency();
  p.beta = 0.8;
  CHECK(eval_efficiency(p, 0.7) == doctest::Approx(0.2115).epsilon(1e-12));  // p(0.56)
  CHECK(eval_efficiency(p, 1.0) == doctest::Approx(0.0975).epsilon(1e-12));  // p(0.8)

  EfficiencyFunction q = fis_efficiency();
  q.levels = {0.21, 0.1};
  q.breakpoints = {0.566, 0.731};
  q.amplification = 1.15;
  CHECK(eval_efficiency(q, 0.0) == doctest::Approx(0.2415).epsilon(1e-12));
}

TEST_CASE("efficiency: piecewise constant staircase") {
  EfficiencyFunction p = staircase_efficiency();
  CHECK(eval_efficiency(p, 0.0) == doctest::Approx(0.21).epsilon(1e-15));
  CHECK(eval_efficiency(p, 0.565) == doctest::Approx(0.21).epsilon(1e-15));
  CHECK(eval_efficiency(p, 0.566) == doctest::Approx(0.168).epsilon(1e-15));
  CHECK(eval_efficiency(p, 0.73) == doctest::Approx(0.168).epsilon(1e-15));
  CHECK(eval_efficiency(p, 0.731) == doctest::Approx(0.021).epsilon(1e-15));
  CHECK(eval_efficiency(p, 1.0) == doctest::Approx(0.021).epsilon(1e-15));
}

TEST_CASE("efficiency: structural validation catches malformed functions") {
  CHECK(efficiency_errors(fis_efficiency()).empty());
  CHECK(efficiency_errors(staircase_efficiency()).empty());

  EfficiencyFunction p = fis_efficiency();
  p.levels = {0.24, 0.05, 0.01};  // PL needs exactly two levels
  CHECK_FALSE(efficiency_errors(p).empty());

  p = staircase_efficiency();
  p.levels = {0.1, 0.2, 0.3};  // increasing
  CHECK_FALSE(efficiency_errors(p).empty());

  p = staircase_efficiency();
  p.levels = {0.21, 0.1, -0.05};  // negative level
  CHECK_FALSE(efficiency_errors(p).empty());

  p = staircase_efficiency();
  p.breakpoints = {0.731, 0.566};  // unsorted breakpoints
  CHECK_FALSE(efficiency_errors(p).empty());

  p = staircase_efficiency();
  p.breakpoints = {0.566, 1.5};  // breakpoint outside (0, 1)
  CHECK_FALSE(efficiency_errors(p).empty());
}

TEST_CASE("weight: affine ramp with unit integral") {
  WeightFunction w;
  w.support_width = 1.0;
  w.anchor = -1.72;
  CHECK(eval_weight(w, w.anchor) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval_weight(w, w.anchor - 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_weight(w, w.anchor - 1.0) == 0.0);
  CHECK(eval_weight(w, w.anchor - 1.0001) == 0.0);
  CHECK(eval_weight(w, w.anchor + 0.0001) == 0.0);

  // Trapezoid quadrature of the ramp over its support; nodes are measured
  // back from the anchor so the peak endpoint is hit exactly.
  const int n = 4000;
  const double h = 1.0 / n;
  double integral = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = w.anchor - static_cast<double>(n - i) * h;
    const double b = w.anchor - static_cast<double>(n - i - 1) * h;
    integral += 0.5 * (eval_weight(w, a) + eval_weight(w, b)) * h;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));

  WeightFunction wide;
  wide.support_width = 2.5;
  wide.anchor = 0.0;
  CHECK(eval_weight(wide, 0.0) == doctest::Approx(2.0 / 2.5).epsilon(1e-15));
}

TEST_CASE("datum: block mass") {
  InitialDatum d;
  d.blocks = {{-5.75, -2.0, 1.0}};
  CHECK(d.mass() == doctest::Approx(3.75).epsilon(1e-15));
  d.blocks.push_back({0.5, 1.0, 0.4});
  CHECK(d.mass() == doctest::Approx(3.95).epsilon(1e-15));
}

TEST_CASE("hypotheses: reference parameters pass, oversized efficiency fails") {
  FluxModel m;
  WeightFunction w;
  w.support_width = 1.0;
  w.anchor = 0.0;

  HypothesisReport ok = validate_hypotheses(m, fis_efficiency(), w);
  CHECK(ok.all_ok());
  CHECK(ok.failures.empty());

  ok = validate_hypotheses(m, staircase_efficiency(), w);
  CHECK(ok.all_ok());

  // p(0) = 0.3 exceeds the local capacity 0.25: the constraint could never bind.
  EfficiencyFunction big = fis_efficiency();
  big.levels = {0.3, 0.05};
  HypothesisReport bad = validate_hypotheses(m, big, w);
  CHECK_FALSE(bad.efficiency_ok);
  CHECK_FALSE(bad.all_ok());
  CHECK_FALSE(bad.failures.empty());
}
