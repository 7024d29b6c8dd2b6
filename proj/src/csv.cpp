#include "kvplate/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kvplate/errors.hpp"

namespace kvplate {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header) : os_(&os), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) *os_ << (i ? "," : "") << header[i];
  *os_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw ConfigError("csv: row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) *os_ << (i ? "," : "") << format_number(values[i]);
  *os_ << '\n';
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ConfigError("csv: no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::values(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(where + ": '" + s + "' is not a number");
  return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("csv: cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: '" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    const std::string where = path.string() + ":" + std::to_string(number);
    if (cells.size() != t.header.size()) throw ConfigError(where + ": expected " + std::to_string(t.header.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, where));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace kvplate
