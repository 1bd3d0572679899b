#pragma once

#include <string>
#include <vector>

namespace ldg::cli {

struct Series {
  std::string name;
  std::string color;
  std::vector<double> values;  // one point per epoch
};

/// Static SVG line chart of per-epoch series (training curves). Output is
/// byte-deterministic for identical inputs.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::vector<Series>& series);

}  // namespace ldg::cli
