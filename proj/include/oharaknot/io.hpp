#pragma once

// Plain-text vertex tables: one point per line, 1-3 decimal fields separated by
// whitespace and/or commas, '#' starts a comment line. Shared by curve files,
// sphere-map files and sampled functions.

#include "oharaknot/core.hpp"
#include "oharaknot/curve.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace oknot {

/// Rows of a vertex table; every row has the same number of columns.
struct Table {
  std::vector<std::vector<double>> rows;
  std::size_t columns = 0;
};

inline Table parse_table(std::istream& in, std::size_t min_cols = 1, std::size_t max_cols = 3) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (char& c : line) {
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    }
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) break;
      std::size_t end = line.find(' ', pos);
      if (end == std::string::npos) end = line.size();
      double value = 0.0;
      const char* b = line.data() + pos;
      const char* e = line.data() + end;
      const auto res = std::from_chars(b, e, value);
      if (res.ec != std::errc() || res.ptr != e || !std::isfinite(value))
        throw Error(ErrorKind::InvalidCurve,
                    "line " + std::to_string(line_no) + ": malformed field '" + std::string(b, e) + "'");
      row.push_back(value);
      pos = end;
    }
    if (row.size() < min_cols || row.size() > max_cols)
      throw Error(ErrorKind::InvalidCurve, "line " + std::to_string(line_no) + ": expected " +
                                               std::to_string(min_cols) + "-" + std::to_string(max_cols) +
                                               " fields, got " + std::to_string(row.size()));
    if (table.columns == 0) table.columns = row.size();
    if (row.size() != table.columns)
      throw Error(ErrorKind::InvalidCurve, "line " + std::to_string(line_no) + ": inconsistent column count");
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline Table read_table(const std::string& path, std::size_t min_cols = 1, std::size_t max_cols = 3) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return parse_table(in, min_cols, max_cols);
}

inline void write_rows(std::ostream& out, const std::vector<Vec3>& points, int columns) {
  out << std::setprecision(17);
  for (const auto& p : points) {
    for (int c = 0; c < columns; ++c) {
      if (c) out << ' ';
      out << p[c];
    }
    out << '\n';
  }
}

inline PolyCurve parse_curve(std::istream& in) {
  const Table table = parse_table(in, 2, 3);
  if (table.rows.size() < 3) throw Error(ErrorKind::InvalidCurve, "curve file needs at least 3 vertices");
  std::vector<Vec3> pts;
  pts.reserve(table.rows.size());
  for (const auto& r : table.rows) pts.emplace_back(r[0], r[1], table.columns == 3 ? r[2] : 0.0);
  return PolyCurve(std::move(pts), static_cast<int>(table.columns));
}

inline PolyCurve read_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return parse_curve(in);
}

inline void write_curve(const PolyCurve& curve, std::ostream& out) {
  write_rows(out, curve.vertices(), curve.dim());
}

inline void write_curve(const PolyCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  write_curve(curve, out);
}

}  // namespace oknot
