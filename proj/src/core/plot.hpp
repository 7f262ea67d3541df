#pragma once

#include <string>
#include <vector>

namespace penh {

// Minimal polyline chart for loss curves: white canvas, gray axes, one fixed
// palette color per series, color-swatch legend in the top-right corner. Not
// a publication figure; the CLI prints the swatch-to-series key on stdout.
void plot_series(const std::vector<std::vector<double>>& series, const std::string& out_png,
                 int width = 900, int height = 500);

}  // namespace penh
