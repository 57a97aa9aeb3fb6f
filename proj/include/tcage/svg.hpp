#pragma once

#include "tcage/curves.hpp"
#include "tcage/smoothing.hpp"

#include <string>

namespace tcage {

struct PlotStyle {
    int width = 800;
    int height = 500;
    std::string title;
    std::string x_label = "age (days)";
    std::string y_label = "rate";
    std::string point_color = "#c0392b";
    std::string line_color = "#1f4e9c";
    std::string band_color = "#9e9e9e";
    double point_radius = 2.0;
};

/// Standalone SVG: one dot per rate point (hollow when low-support), a
/// translucent confidence band and a polyline for the smooth when it has at
/// least two points, and linear axes with tick labels. Output depends only on
/// the inputs.
std::string emit_svg(const RateSeries& series, const SmoothedCurve* smooth, const PlotStyle& style = {});

/// "nice" tick positions covering [lo, hi]
std::vector<double> axis_ticks(double lo, double hi, int target_count = 6);

}  // namespace tcage
