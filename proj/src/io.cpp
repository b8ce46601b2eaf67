#include "cfv/io.hpp"

#include <cstdio>
#include <fstream>

#include "cfv/util.hpp"

namespace cfv {

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

void write_or_throw(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_or_throw(path, text);
}

void write_timeseries_csv(const std::filesystem::path& path, const SimOutput& out) {
  std::string text = "t";
  for (std::size_t k = 0; k < out.q_history.size(); ++k)
    text += ",q_site_" + std::to_string(k);
  text += ",exit_density,mass\n";
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    text += format_double(out.times[i]);
    for (const auto& q : out.q_history) text += "," + format_double(q[i]);
    text += "," + format_double(out.exit_trace[i]);
    text += "," + format_double(out.mass_history[i]);
    text += "\n";
  }
  write_or_throw(path, text);
}

void write_snapshot_csv(const std::filesystem::path& path, const Grid& g, const Array& rho) {
  std::string text = "x,rho\n";
  for (Index j = 0; j < g.n_cells; ++j)
    text += format_double(g.cell_center(j)) + "," + format_double(rho[j]) + "\n";
  write_or_throw(path, text);
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  std::string text = "param,evac_time\n";
  for (const SweepRow& row : result.rows) {
    text += format_double(row.parameter) + ",";
    text += row.evacuation_time ? format_double(*row.evacuation_time) : "nan";
    text += "\n";
  }
  write_or_throw(path, text);
}

void write_trace_csv(const std::filesystem::path& path, const TraceSeries& trace) {
  std::string text = "t,exit_density\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    text += format_double(trace.times[i]) + "," + format_double(trace.exit_density[i]) + "\n";
  write_or_throw(path, text);
}

std::string snapshot_label(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", t);
  return buf;
}

std::string validation_report_json(const ValidationReport& report) {
  std::string s = "{\n";
  s += "  \"reference_cells\": " + std::to_string(report.reference_cells) + ",\n";
  s += "  \"error_time\": " + format_double(report.error_time) + ",\n";
  s += "  \"order\": " + format_double(report.order) + ",\n";
  s += "  \"max_density_overshoot\": " + format_double(report.max_density_overshoot) + ",\n";
  s += "  \"max_conservation_residual\": " + format_double(report.max_conservation_residual) +
       ",\n";
  s += "  \"rows\": [\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ValidationRow& r = report.rows[i];
    s += "    {\"n_cells\": " + std::to_string(r.n_cells) + ", \"dx\": " + format_double(r.dx) +
         ", \"error\": " + format_double(r.error) + "}";
    s += i + 1 < report.rows.size() ? ",\n" : "\n";
  }
  s += "  ]\n}\n";
  return s;
}

std::string properties_report_json(const PropertyReport& report) {
  std::string s = "{\n";
  s += "  \"seed\": " + std::to_string(report.seed) + ",\n";
  s += std::string("  \"all_pass\": ") + (report.all_pass() ? "true" : "false") + ",\n";
  s += "  \"checks\": [\n";
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const PropertyCheck& c = report.checks[i];
    s += "    {\"name\": \"" + json_escape(c.name) + "\", \"pass\": " +
         (c.pass ? "true" : "false") + ", \"detail\": \"" + json_escape(c.detail) + "\"}";
    s += i + 1 < report.checks.size() ? ",\n" : "\n";
  }
  s += "  ]\n}\n";
  return s;
}

}  // namespace cfv
