#pragma once

#include <Eigen/Dense>

#include "cfv/model.hpp"

namespace cfv {

using Array = Eigen::ArrayXd;
using Index = Eigen::Index;

// Uniform 1-D mesh of [x_left, x_right]: interfaces at x_left + j*dx for
// j = 0..n_cells, cell j spanning [interface(j), interface(j+1)).
struct Grid {
  double x_left = 0.0;
  double x_right = 1.0;
  double dx = 1.0;
  Index n_cells = 1;

  double interface_position(Index j) const { return x_left + static_cast<double>(j) * dx; }
  double cell_center(Index j) const { return x_left + (static_cast<double>(j) + 0.5) * dx; }
  double span() const { return x_right - x_left; }
};

// Errors unless (x_right - x_left) / dx is an integer within 1e-9 relative;
// the stored dx is span/n_cells so interface positions close up exactly.
Grid build_grid(double x_left, double x_right, double dx);

// Index of the interface nearest to x (ties toward the smaller index),
// clamped to [0, n_cells].
Index locate_interface(const Grid& g, double x);

// Exact cell averages of the block datum (partial overlaps included).
Array project_datum(const Grid& g, const InitialDatum& datum);

// A point constraint attached to interface `interface_index`: the numerical
// flux there is capped by p(xi) with xi the weighted average of the densities
// in cells [first_weight_cell, interface_index).
struct ConstraintSite {
  Index interface_index = 0;
  Index first_weight_cell = 0;
  EfficiencyFunction efficiency;
  WeightFunction weight;  // anchored at the interface position
  Array cell_weights_dx;  // dx * w(cell_center(j)), midpoint quadrature weights
};

struct SiteBuildInfo {
  double requested_position = 0.0;
  double snapped_position = 0.0;
  double snap_distance = 0.0;
  bool snap_warning = false;  // moved by more than dx/10
};

ConstraintSite make_constraint_site(const Grid& g, double position, EfficiencyFunction efficiency,
                                    double support_width, SiteBuildInfo* info = nullptr);

// xi = dx * sum_j w(x_j) rho_j over the site's weight cells, clamped to [0, 1].
double weighted_average(const ConstraintSite& site, const Array& rho);

}  // namespace cfv
