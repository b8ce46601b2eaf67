#include "cfv/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "cfv/util.hpp"

namespace cfv {

std::optional<double> evacuation_time(const SimOutput& out, double threshold) {
  for (std::size_t i = 0; i < out.mass_history.size(); ++i)
    if (out.mass_history[i] <= threshold) return out.times[i];
  return std::nullopt;
}

double relative_l1_error(const Grid& fine_grid, const Array& fine, const Grid& coarse_grid,
                         const Array& coarse) {
  if (fine.size() != fine_grid.n_cells || coarse.size() != coarse_grid.n_cells)
    throw ConfigError("relative_l1_error: field sizes do not match their grids");
  const double span = fine_grid.span();
  if (std::abs(fine_grid.x_left - coarse_grid.x_left) > 1e-9 * span ||
      std::abs(fine_grid.x_right - coarse_grid.x_right) > 1e-9 * span)
    throw ConfigError("relative_l1_error: grids cover different spans");
  if (coarse_grid.n_cells < 1 || fine_grid.n_cells % coarse_grid.n_cells != 0)
    throw ConfigError("relative_l1_error: grids do not nest (" +
                      std::to_string(fine_grid.n_cells) + " vs " +
                      std::to_string(coarse_grid.n_cells) + " cells)");

  double num = 0.0, den = 0.0;
  for (Index j = 0; j < coarse_grid.n_cells; ++j) {
    const double x = coarse_grid.cell_center(j);
    auto k = static_cast<Index>(std::floor((x - fine_grid.x_left) / fine_grid.dx));
    k = std::clamp<Index>(k, 0, fine_grid.n_cells - 1);
    num += std::abs(fine[k] - coarse[j]);
    den += std::abs(fine[k]);
  }
  if (den == 0.0)
    throw std::domain_error("relative_l1_error: reference field is identically zero");
  return num / den;
}

double convergence_order(const std::vector<std::pair<double, double>>& dx_and_error) {
  if (dx_and_error.size() < 3)
    throw std::invalid_argument("convergence_order: need at least 3 refinement levels");
  std::vector<std::pair<double, double>> logs;
  for (const auto& [dx, err] : dx_and_error)
    if (dx > 0.0 && err > 0.0) logs.emplace_back(std::log(dx), std::log(err));
  if (logs.size() < 2)
    throw std::invalid_argument("convergence_order: fewer than 2 usable (positive) points");
  double mx = 0.0, my = 0.0;
  for (const auto& [lx, ly] : logs) {
    mx += lx;
    my += ly;
  }
  mx /= static_cast<double>(logs.size());
  my /= static_cast<double>(logs.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [lx, ly] : logs) {
    sxy += (lx - mx) * (ly - my);
    sxx += (lx - mx) * (lx - mx);
  }
  return sxy / sxx;
}

double bv_norm(const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t i = 1; i < q.size(); ++i) tv += std::abs(q[i] - q[i - 1]);
  return tv;
}

}  // namespace cfv
