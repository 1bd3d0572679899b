#include "ldg/csv.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace ldg {

CsvReader::CsvReader(const std::string& path) : in_(path), path_(path) {
  if (!in_) throw IoError("cannot open " + path);
}

void CsvReader::expect_header(const std::vector<std::string>& columns) {
  std::vector<std::string> fields;
  if (!next(fields)) throw ParseError(path_ + ": missing header row");
  if (fields != columns) {
    std::string want;
    for (size_t i = 0; i < columns.size(); ++i)
      want += (i ? "," : "") + columns[i];
    std::string got;
    for (size_t i = 0; i < fields.size(); ++i) got += (i ? "," : "") + fields[i];
    throw ParseError(path_ + ": expected header '" + want + "', got '" + got + "'");
  }
}

bool CsvReader::next(std::vector<std::string>& fields) {
  std::string row;
  while (std::getline(in_, row)) {
    ++line_;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    fields.clear();
    size_t start = 0;
    while (true) {
      size_t comma = row.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(row.substr(start));
        break;
      }
      fields.push_back(row.substr(start, comma - start));
      start = comma + 1;
    }
    return true;
  }
  return false;
}

int parse_int(const std::string& field, const std::string& path, size_t line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError(path + ": bad integer '" + field + "' at line " +
                     std::to_string(line));
  return value;
}

double parse_double(const std::string& field, const std::string& path, size_t line) {
  try {
    size_t consumed = 0;
    double value = std::stod(field, &consumed);
    if (consumed != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    throw ParseError(path + ": bad number '" + field + "' at line " +
                     std::to_string(line));
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(probe, "%lf", &back);
    if (back == v) return probe;
  }
  return buf;
}

}  // namespace ldg
