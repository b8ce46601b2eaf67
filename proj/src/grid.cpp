#include "cfv/grid.hpp"

#include <algorithm>
#include <cmath>

#include "cfv/util.hpp"

namespace cfv {

Grid build_grid(double x_left, double x_right, double dx) {
  if (!(x_right > x_left))
    throw ConfigError("domain: x_right = " + format_double(x_right) +
                      " must exceed x_left = " + format_double(x_left));
  if (!(dx > 0.0)) throw ConfigError("dx: must be positive, got " + format_double(dx));
  const double span = x_right - x_left;
  const auto n = static_cast<Index>(std::llround(span / dx));
  if (n < 1 || std::abs(static_cast<double>(n) * dx - span) > 1e-9 * span)
    throw ConfigError("dx: domain length " + format_double(span) +
                      " is not an integer multiple of dx = " + format_double(dx));
  Grid g;
  g.x_left = x_left;
  g.x_right = x_right;
  g.n_cells = n;
  g.dx = span / static_cast<double>(n);  // closes the last interface onto x_right
  return g;
}

Index locate_interface(const Grid& g, double x) {
  double u = (x - g.x_left) / g.dx;
  auto j = static_cast<Index>(std::floor(u));
  j = std::clamp<Index>(j, 0, g.n_cells);
  if (j < g.n_cells) {
    const double d_here = std::abs(x - g.interface_position(j));
    const double d_next = std::abs(g.interface_position(j + 1) - x);
    if (d_next < d_here) ++j;  // ties stay at the smaller index
  }
  return j;
}

Array project_datum(const Grid& g, const InitialDatum& datum) {
  Array rho = Array::Zero(g.n_cells);
  for (const InitialDatum::Block& b : datum.blocks) {
    if (!(b.right > b.left) || b.level == 0.0) continue;
    auto j0 = static_cast<Index>(std::floor((b.left - g.x_left) / g.dx));
    auto j1 = static_cast<Index>(std::floor((b.right - g.x_left) / g.dx));
    j0 = std::clamp<Index>(j0, 0, g.n_cells - 1);
    j1 = std::clamp<Index>(j1, 0, g.n_cells - 1);
    for (Index j = j0; j <= j1; ++j) {
      const double cl = g.interface_position(j);
      const double cr = g.interface_position(j + 1);
      const double lo = std::max(b.left, cl);
      const double hi = std::min(b.right, cr);
      if (hi <= lo) continue;
      // Fully covered cells take the level exactly; partial overlaps never
      // exceed it (guards against round-off pushing the average past level).
      const double frac =
          (b.left <= cl && cr <= b.right) ? 1.0 : std::min(1.0, (hi - lo) / g.dx);
      rho[j] += b.level * frac;
    }
  }
  return rho;
}

ConstraintSite make_constraint_site(const Grid& g, double position, EfficiencyFunction efficiency,
                                    double support_width, SiteBuildInfo* info) {
  if (!(support_width > 0.0))
    throw ConfigError("weight_support: must be positive, got " + format_double(support_width));

  ConstraintSite site;
  site.interface_index = locate_interface(g, position);
  const double snapped = g.interface_position(site.interface_index);
  if (info) {
    info->requested_position = position;
    info->snapped_position = snapped;
    info->snap_distance = std::abs(snapped - position);
    info->snap_warning = info->snap_distance > g.dx / 10.0;
  }
  site.efficiency = std::move(efficiency);
  site.weight = WeightFunction{support_width, snapped};

  auto first = static_cast<Index>(std::floor((snapped - support_width - g.x_left) / g.dx));
  first = std::clamp<Index>(first, 0, site.interface_index);
  // Drop leading cells whose center carries no weight (they contribute 0).
  while (first < site.interface_index && eval_weight(site.weight, g.cell_center(first)) == 0.0)
    ++first;
  site.first_weight_cell = first;

  const Index len = site.interface_index - first;
  site.cell_weights_dx = Array(len);
  for (Index k = 0; k < len; ++k)
    site.cell_weights_dx[k] = g.dx * eval_weight(site.weight, g.cell_center(first + k));
  return site;
}

double weighted_average(const ConstraintSite& site, const Array& rho) {
  const Index len = site.cell_weights_dx.size();
  if (len == 0) return 0.0;
  const double xi =
      (site.cell_weights_dx * rho.segment(site.first_weight_cell, len)).sum();
  return clamp01(xi);
}

}  // namespace cfv
