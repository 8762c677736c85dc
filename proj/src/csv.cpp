#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "kronlow/errors.hpp"
#include "kronlow/format.hpp"
#include "kronlow/pointset.hpp"

namespace kronlow {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::size_t parse_count(std::string_view field, std::string_view key, std::size_t line) {
  field = trim(field);
  if (field.substr(0, key.size()) != key || field.size() <= key.size() || field[key.size()] != '=')
    throw ParseError(line, "expected header field '" + std::string(key) + "=<int>'");
  field.remove_prefix(key.size() + 1);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError(line, "header field '" + std::string(key) + "' is not a non-negative integer");
  return value;
}

double parse_coordinate(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
    throw ParseError(line, "cannot parse coordinate '" + std::string(field) + "'");
  if (!(value >= 0.0 && value <= 1.0)) throw ParseError(line, "coordinate " + std::string(field) + " outside [0,1]");
  return value;
}

}  // namespace

void save_csv(const PointSet& points, std::ostream& out) {
  const std::size_t d = points.dim();
  out << "d=" << d << ",n=" << points.size() << '\n';
  std::string row;
  for (std::size_t i = 0; i < points.size(); ++i) {
    row.clear();
    for (std::size_t j = 0; j < d; ++j) {
      if (j) row += ',';
      row += format_double(points(i, j));
    }
    out << row << '\n';
  }
}

void save_csv(const PointSet& points, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_csv(points, out);
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

PointSet load_csv(std::istream& in) {
  std::string text;
  std::size_t line = 0;

  std::size_t d = 0, n = 0;
  while (std::getline(in, text)) {
    ++line;
    std::string_view header = trim(text);
    if (header.empty()) continue;
    const auto comma = header.find(',');
    if (comma == std::string_view::npos) throw ParseError(line, "header must be 'd=<d>,n=<n>'");
    d = parse_count(header.substr(0, comma), "d", line);
    n = parse_count(header.substr(comma + 1), "n", line);
    if (d == 0) throw ParseError(line, "dimension must be >= 1");
    break;
  }
  if (d == 0) throw ParseError(line == 0 ? 1 : line, "missing header");

  std::vector<double> coords;
  coords.reserve(n * d);
  std::size_t rows = 0;
  while (std::getline(in, text)) {
    ++line;
    std::string_view row = trim(text);
    if (row.empty()) continue;
    if (rows == n) throw ParseError(line, "more rows than the declared n=" + std::to_string(n));
    std::size_t fields = 0;
    while (true) {
      const auto comma = row.find(',');
      if (fields == d) throw ParseError(line, "more than d=" + std::to_string(d) + " fields");
      coords.push_back(parse_coordinate(row.substr(0, comma), line));
      ++fields;
      if (comma == std::string_view::npos) break;
      row.remove_prefix(comma + 1);
    }
    if (fields != d)
      throw ParseError(line, "expected " + std::to_string(d) + " fields, found " + std::to_string(fields));
    ++rows;
  }
  if (rows != n)
    throw ParseError(line + 1, "expected " + std::to_string(n) + " rows, found " + std::to_string(rows));
  return PointSet(n, d, std::move(coords));
}

PointSet load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_csv(in);
}

}  // namespace kronlow
