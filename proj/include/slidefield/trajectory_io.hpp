#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slidefield/common.hpp"
#include "slidefield/integrator.hpp"
#include "slidefield/scenario.hpp"

namespace slidefield {

/// Full round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline char mode_code(Mode mode) {
  switch (mode) {
    case Mode::FreeG1: return '1';
    case Mode::FreeG2: return '2';
    case Mode::Sliding: return 'S';
  }
  return '?';
}

/// Trajectory CSV: '#' metadata lines, a column header
/// "t,x1,...,xn,mode,gap", then one row per recorded state. Consecutive
/// segments share their boundary state, so a time repeats exactly where the
/// mode changes.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const SurfaceChart& surface,
                                 const ScenarioConfig& cfg) {
  out << "# slidefield trajectory\n";
  out << "# version: " << kVersion << "\n";
  out << "# seed: " << cfg.seed << "\n";
  out << "# config: " << to_json(cfg).dump() << "\n";
  out << "t";
  for (int i = 1; i <= surface.dim(); ++i) out << ",x" << i;
  out << ",mode,gap\n";
  for (const Segment& seg : traj.segments) {
    for (std::size_t k = 0; k < seg.times.size(); ++k) {
      const Vec& x = seg.states[k];
      out << format_double(seg.times[k]);
      for (Eigen::Index i = 0; i < x.size(); ++i) out << ',' << format_double(x(i));
      out << ',' << mode_code(seg.mode) << ',' << format_double(surface.gap(x)) << '\n';
    }
  }
}

inline nlohmann::ordered_json events_json(const Trajectory& traj) {
  auto nullable = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
  nlohmann::ordered_json j;
  j["schema"] = "slidefield.events/1";
  j["final_mode"] = traj.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(to_string(traj.final_mode()));
  auto events = nlohmann::ordered_json::array();
  for (const EventRecord& e : traj.events) {
    nlohmann::ordered_json ej;
    ej["time"] = e.time;
    ej["kind"] = to_string(e.kind);
    auto state = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < e.state.size(); ++i) state.push_back(e.state(i));
    ej["state"] = std::move(state);
    ej["x1n"] = nullable(e.detail.lower);
    ej["x2n"] = nullable(e.detail.upper);
    events.push_back(std::move(ej));
  }
  j["events"] = std::move(events);
  return j;
}

/// Parsed trajectory CSV.
struct TrajectoryTable {
  std::vector<std::string> metadata;  // '#' lines without the marker
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // numeric columns, mode column omitted
  std::vector<char> modes;

  /// Index into a row of `values` for a named numeric column.
  std::optional<std::size_t> numeric_index(const std::string& name) const {
    std::size_t idx = 0;
    for (const auto& c : columns) {
      if (c == "mode") continue;
      if (c == name) return idx;
      ++idx;
    }
    return std::nullopt;
  }

  std::optional<std::string> config_echo() const {
    const std::string key = " config: ";
    for (const auto& m : metadata)
      if (m.rfind(key, 0) == 0) return m.substr(key.size());
    return std::nullopt;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + text + "' in trajectory file");
  }
  if (used != text.size()) throw ConfigError("bad number '" + text + "' in trajectory file");
  return v;
}

inline TrajectoryTable read_trajectory_csv(std::istream& in) {
  TrajectoryTable table;
  std::string line;
  bool have_header = false;
  std::size_t mode_col = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.metadata.push_back(line.substr(1));
      continue;
    }
    auto cells = split_csv_line(line);
    if (!have_header) {
      table.columns = cells;
      const auto it = std::find(cells.begin(), cells.end(), "mode");
      if (cells.empty() || cells.front() != "t" || it == cells.end())
        throw ConfigError("trajectory header needs 't' and 'mode' columns");
      mode_col = static_cast<std::size_t>(it - cells.begin());
      have_header = true;
      continue;
    }
    if (cells.size() != table.columns.size()) throw ConfigError("trajectory row has the wrong number of cells");
    std::vector<double> row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == mode_col) {
        if (cells[i].size() != 1) throw ConfigError("bad mode '" + cells[i] + "'");
        table.modes.push_back(cells[i][0]);
      } else {
        row.push_back(parse_number(cells[i]));
      }
    }
    table.values.push_back(std::move(row));
  }
  if (!have_header) throw ConfigError("trajectory file has no column header");
  return table;
}

/// Checks the file invariants: modes are 1, 2 or S; time never decreases,
/// and repeats only where the mode changes.
inline void validate_trajectory_table(const TrajectoryTable& table) {
  for (std::size_t k = 0; k < table.modes.size(); ++k) {
    const char m = table.modes[k];
    if (m != '1' && m != '2' && m != 'S') throw ConfigError(std::string("invalid mode '") + m + "'");
    if (k == 0) continue;
    const double t_prev = table.values[k - 1][0];
    const double t = table.values[k][0];
    const bool same_segment = table.modes[k - 1] == m;
    if (same_segment ? !(t > t_prev) : !(t >= t_prev)) {
      throw ConfigError("time is not increasing at row " + std::to_string(k + 1));
    }
  }
}

inline double mode_number(char mode) {
  switch (mode) {
    case '1': return 1.0;
    case '2': return 2.0;
    default: return 0.0;
  }
}

/// Whitespace-separated plot file with a (t, value) column pair per series.
/// Series are the requested columns followed by the mode (S = 0, 1, 2). An
/// empty trajectory yields an empty file.
inline void write_plotdata(std::ostream& out, const TrajectoryTable& table, const std::vector<std::string>& cols) {
  std::vector<std::size_t> indices;
  for (const auto& c : cols) {
    const auto idx = table.numeric_index(c);
    if (!idx || c == "t") throw ConfigError("no column '" + c + "' in trajectory");
    indices.push_back(*idx);
  }
  if (table.values.empty()) return;
  out << "#";
  for (const auto& c : cols) out << " t_" << c << ' ' << c;
  out << " t_mode mode\n";
  for (std::size_t k = 0; k < table.values.size(); ++k) {
    const std::string t = format_double(table.values[k][0]);
    for (std::size_t idx : indices) out << t << ' ' << format_double(table.values[k][idx]) << ' ';
    out << t << ' ' << format_double(mode_number(table.modes[k])) << '\n';
  }
}

}  // namespace slidefield
