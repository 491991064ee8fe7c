#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gcilab/error.hpp"
#include "gcilab/gauss_model.hpp"
#include "gcilab/geometry.hpp"
#include "gcilab/normal.hpp"

namespace gcilab::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Decimal number or inf/infinity with an optional sign (case-insensitive).
inline double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  std::string lower(field);
  std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::string_view body = lower;
  double sign = 1.0;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    sign = body.front() == '-' ? -1.0 : 1.0;
    body.remove_prefix(1);
  }
  if (body == "inf" || body == "infinity") return sign * kInf;
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && field.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || field.empty())
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": not a number: '" + std::string(field) + "'");
  return v;
}

}  // namespace detail

/// Rows of comma-separated numbers. An optional first line starting with '#'
/// is a header; blank lines are skipped; every row must have the same width.
inline std::vector<std::vector<double>> parse_rows(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (!rows.empty()) fail(ErrorCode::ParseError, "line " + std::to_string(number) + ": header must come first");
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      row.push_back(detail::parse_number(t.substr(start, comma - start), number));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::ParseError, "line " + std::to_string(number) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::ParseError, "no data rows");
  return rows;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline Matrix parse_matrix(std::string_view text) { return to_matrix(parse_rows(text)); }

/// Covariance CSV; must be square.
inline CorrelationModel parse_covariance(std::string_view text) {
  const Matrix m = parse_matrix(text);
  if (m.rows() != m.cols()) fail(ErrorCode::ParseError, "covariance matrix must be square");
  return CorrelationModel::from_covariance(m);
}

/// Thresholds as one row or one column.
inline ThresholdVector parse_thresholds(std::string_view text) {
  const auto rows = parse_rows(text);
  std::vector<double> v;
  if (rows.size() == 1) {
    v = rows.front();
  } else if (rows.front().size() == 1) {
    for (const auto& r : rows) v.push_back(r.front());
  } else {
    fail(ErrorCode::ParseError, "thresholds must be a single row or column");
  }
  return ThresholdVector(std::move(v));
}

/// One vertex "x,y" per row; the polygon is the hull of the rows.
inline Polygon2D parse_polygon(std::string_view text) {
  const auto rows = parse_rows(text);
  if (rows.front().size() != 2) fail(ErrorCode::ParseError, "polygon rows must be x,y");
  std::vector<Vec2> pts;
  for (const auto& r : rows) pts.push_back({r[0], r[1]});
  return Polygon2D::from_points(std::move(pts));
}

/// One halfspace "n_1,...,n_d,offset" per row.
inline HPolytope parse_hpolytope(std::string_view text) {
  const Matrix m = parse_matrix(text);
  if (m.cols() < 2) fail(ErrorCode::ParseError, "halfspace rows need a normal and an offset");
  return HPolytope::from_halfspaces(m.leftCols(m.cols() - 1), m.col(m.cols() - 1));
}

inline CorrelationModel read_covariance(const std::string& path) { return parse_covariance(read_file(path)); }
inline ThresholdVector read_thresholds(const std::string& path) { return parse_thresholds(read_file(path)); }
inline Polygon2D read_polygon(const std::string& path) { return parse_polygon(read_file(path)); }
inline HPolytope read_hpolytope(const std::string& path) { return parse_hpolytope(read_file(path)); }

}  // namespace gcilab::io
