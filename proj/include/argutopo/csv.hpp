#pragma once

// Plain CSV for series and point clouds: one value / one point per row,
// comma-separated coordinates, 17 significant digits.

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "argutopo/detail/numfmt.hpp"
#include "argutopo/error.hpp"
#include "argutopo/signal.hpp"

namespace argutopo {

namespace detail {

inline std::vector<std::vector<double>> read_csv_rows(std::istream& in, std::string_view what) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      auto field = rest.substr(0, comma);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      const auto value = parse_real<double>(field);
      if (!value || !std::isfinite(*value)) {
        throw ParseError(std::string(what) + " line " + std::to_string(line_no) +
                         ": bad value '" + std::string(field) + "'");
      }
      row.push_back(*value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw ParseError(std::string(what) + ": read failure");
  return rows;
}

}  // namespace detail

inline TimeSeries read_series_csv(std::istream& in) {
  const auto rows = detail::read_csv_rows(in, "series csv");
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1) {
      throw ParseError("series csv row " + std::to_string(i + 1) + ": expected one value, found " +
                       std::to_string(rows[i].size()));
    }
    values.push_back(rows[i][0]);
  }
  return TimeSeries(std::move(values));
}

inline void write_series_csv(const TimeSeries& series, std::ostream& out) {
  for (double v : series.values()) out << detail::format_real(v) << '\n';
}

inline PointCloud read_point_cloud_csv(std::istream& in) {
  const auto rows = detail::read_csv_rows(in, "point cloud csv");
  if (rows.empty()) throw ParseError("point cloud csv: no points");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw ParseError("point cloud csv row " + std::to_string(i + 1) + ": expected " +
                       std::to_string(rows[0].size()) + " coordinates, found " +
                       std::to_string(rows[i].size()));
    }
  }
  return PointCloud::from_rows(rows);
}

inline void write_point_cloud_csv(const PointCloud& cloud, std::ostream& out) {
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k) out << ',';
      out << detail::format_real(p[k]);
    }
    out << '\n';
  }
}

}  // namespace argutopo
