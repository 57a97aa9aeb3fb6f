#include "tcage/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace tcage {

namespace {

struct Frame {
    double left = 70, right = 20, top = 40, bottom = 55;
    double width = 0, height = 0;
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;

    double px(double x) const { return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right); }
    double py(double y) const { return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom); }
};

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string coord(double v) { return fmt::format("{:.2f}", v); }

std::string tick_label(double v, double step) {
    const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
    if (std::abs(v) < step * 1e-9) v = 0.0;
    return fmt::format("{:.{}f}", v, decimals);
}

}  // namespace

std::vector<double> axis_ticks(double lo, double hi, int target_count) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / std::max(1, target_count);
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    double step = magnitude;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * magnitude;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + step * 1e-9; v += step) ticks.push_back(v);
    return ticks;
}

std::string emit_svg(const RateSeries& series, const SmoothedCurve* smooth, const PlotStyle& style) {
    Frame f;
    f.width = style.width;
    f.height = style.height;
    if (!series.points.empty()) {
        f.x_lo = static_cast<double>(series.points.front().age_days);
        f.x_hi = static_cast<double>(series.points.back().age_days);
    }
    f.y_lo = 0.0;
    f.y_hi = 0.0;
    for (const auto& p : series.points) f.y_hi = std::max(f.y_hi, p.rate);
    if (smooth) {
        for (const auto& p : smooth->points) {
            f.y_hi = std::max(f.y_hi, p.ci_high);
            f.y_lo = std::min(f.y_lo, p.ci_low);
        }
    }
    if (!(f.x_hi > f.x_lo)) f.x_hi = f.x_lo + 1.0;
    if (!(f.y_hi > f.y_lo)) f.y_hi = f.y_lo + 1.0;

    const auto x_ticks = axis_ticks(f.x_lo, f.x_hi);
    const auto y_ticks = axis_ticks(f.y_lo, f.y_hi);
    const double x_step = x_ticks.size() > 1 ? x_ticks[1] - x_ticks[0] : 1.0;
    const double y_step = y_ticks.size() > 1 ? y_ticks[1] - y_ticks[0] : 1.0;

    std::string svg;
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
        style.width, style.height);
    svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", style.width,
                       style.height);
    if (!style.title.empty()) {
        svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                           "font-size=\"15\">{}</text>\n",
                           coord(style.width / 2.0), escape_xml(style.title));
    }

    // axes
    const double x0 = f.left, x1 = f.width - f.right, y0 = f.height - f.bottom, y1 = f.top;
    svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", coord(x0), coord(y0), coord(x1), coord(y0));
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", coord(x0), coord(y0), coord(x0), coord(y1));
    for (double t : x_ticks) {
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>\n", coord(f.px(t)), coord(y0),
                           coord(y0 + 5));
    }
    for (double t : y_ticks) {
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n", coord(x0 - 5), coord(f.py(t)),
                           coord(x0));
    }
    svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double t : x_ticks) {
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", coord(f.px(t)),
                           coord(y0 + 18), tick_label(t, x_step));
    }
    for (double t : y_ticks) {
        svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", coord(x0 - 8),
                           coord(f.py(t) + 4), tick_label(t, y_step));
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
                       coord((x0 + x1) / 2), coord(f.height - 12), escape_xml(style.x_label));
    svg += fmt::format("<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" font-size=\"13\" "
                       "transform=\"rotate(-90 16 {0})\">{1}</text>\n",
                       coord((y0 + y1) / 2), escape_xml(style.y_label));
    svg += "</g>\n";

    if (smooth && smooth->points.size() >= 2) {
        std::string band;
        for (const auto& p : smooth->points) band += fmt::format("{},{} ", coord(f.px(p.age_days)), coord(f.py(p.ci_high)));
        for (auto it = smooth->points.rbegin(); it != smooth->points.rend(); ++it) {
            band += fmt::format("{},{} ", coord(f.px(it->age_days)), coord(f.py(it->ci_low)));
        }
        band.pop_back();
        svg += fmt::format("<polygon class=\"band\" points=\"{}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"none\"/>\n",
                           band, style.band_color);
    }

    svg += fmt::format("<g class=\"points\" stroke=\"{0}\" fill=\"{0}\">\n", style.point_color);
    for (const auto& p : series.points) {
        const auto cx = coord(f.px(static_cast<double>(p.age_days)));
        const auto cy = coord(f.py(p.rate));
        if (p.low_support) {
            svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\"/>\n", cx, cy, style.point_radius);
        } else {
            svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n", cx, cy, style.point_radius);
        }
    }
    svg += "</g>\n";

    if (smooth && smooth->points.size() >= 2) {
        std::string line;
        for (const auto& p : smooth->points) line += fmt::format("{},{} ", coord(f.px(p.age_days)), coord(f.py(p.fitted)));
        line.pop_back();
        svg += fmt::format("<polyline class=\"smooth\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           line, style.line_color);
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace tcage
