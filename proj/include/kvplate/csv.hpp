#pragma once

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace kvplate {

/// Shortest round-trip decimal form, "." separator, no locale; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_number(double v);

class CsvWriter {
public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);
  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

private:
  std::ostream* os_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Throws ConfigError when the column is absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> values(std::string_view name) const;
};

/// Numeric CSV with a header row. Throws ConfigError on a missing file, a
/// ragged row or a field that is not a number.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace kvplate
