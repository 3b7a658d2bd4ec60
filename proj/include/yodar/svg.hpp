#pragma once

#include <string>
#include <vector>

#include "yodar/evaluate.hpp"

namespace yodar {

// Grouped bar chart (distance bins on x, one bar per series per bin).
std::string svg_grouped_bars(const std::vector<std::string>& series_names,
                             const std::vector<std::vector<double>>& series_values,
                             const std::vector<std::string>& bin_labels, const std::string& title);

// Heatmap render; NaN cells are drawn blank. `signed_scale` centers the color
// ramp at zero for difference maps.
std::string svg_heatmap(const Heatmap& h, const std::string& title, bool signed_scale = false);

}  // namespace yodar
