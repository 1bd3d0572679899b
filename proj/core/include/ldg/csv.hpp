#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "ldg/errors.hpp"

namespace ldg {

/// Minimal CSV reader for the flat, unquoted files this project exchanges.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  /// Validates the header row against the expected column names.
  void expect_header(const std::vector<std::string>& columns);

  /// Reads the next data row into `fields`; returns false at EOF.
  /// Blank lines are skipped.
  bool next(std::vector<std::string>& fields);

  /// 1-based line number of the row most recently returned.
  size_t line() const { return line_; }

 private:
  std::ifstream in_;
  std::string path_;
  size_t line_ = 0;
};

int parse_int(const std::string& field, const std::string& path, size_t line);
double parse_double(const std::string& field, const std::string& path, size_t line);

/// Shortest round-trip decimal representation; identical input bits always
/// produce identical text.
std::string format_double(double v);

}  // namespace ldg
