#pragma once

#include <string>
#include <vector>

namespace monoflow {

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

// Minimal self-contained line chart; nonpositive values are dropped on log
// axes.  Throws IoError when the file cannot be written.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, bool log_x = false,
                    bool log_y = false);

}  // namespace monoflow
