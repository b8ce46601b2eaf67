#pragma once

#include <filesystem>
#include <string>

#include "cfv/experiments.hpp"
#include "cfv/observables.hpp"

namespace cfv {

// All writers emit every number via format_double (>= 15 significant digits)
// and are byte-deterministic for identical inputs.

// Columns: t, q_site_0..q_site_{k-1}, exit_density, mass.
void write_timeseries_csv(const std::filesystem::path& path, const SimOutput& out);

// Columns: x (cell center), rho.
void write_snapshot_csv(const std::filesystem::path& path, const Grid& g, const Array& rho);

// Columns: param, evac_time ("nan" when the threshold was never crossed).
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);

// Columns: t, exit_density.
void write_trace_csv(const std::filesystem::path& path, const TraceSeries& trace);

// Stable short label for snapshot file names (snapshot_<label>.csv).
std::string snapshot_label(double t);

std::string validation_report_json(const ValidationReport& report);
std::string properties_report_json(const PropertyReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cfv
