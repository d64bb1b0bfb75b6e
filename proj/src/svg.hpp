#pragma once

#include <string>
#include <vector>

#include "simplex.hpp"

namespace cipherlab {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Accuracy-vs-step style line plot, SVG 1.1. Empty series lists produce a
// valid plot with axes only.
void write_line_plot(const std::string& path, const std::vector<PlotSeries>& series,
                     const std::string& title, const std::string& x_label,
                     const std::string& y_label);

// Triangle heatmap of a barycentric grid, colored by gradient norm.
void write_simplex_heatmap(const std::string& path, const std::vector<SimplexGridPoint>& grid,
                           const std::string& title);

} // namespace cipherlab
