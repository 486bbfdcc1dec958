#pragma once

#include <string>
#include <vector>

namespace fieldline::cli {

/// Axis range with "nice" tick marks (1, 2 or 5 times a power of ten).
struct TickScale {
    double lo, hi, step;
    std::vector<double> ticks() const;
};

TickScale niceScale(double lo, double hi, int targetTicks = 6);

/** SVG polyline of (x, y) with x horizontal, y vertical and one data unit the same
    length on both axes, so circles stay circles. The longer data side spans `extent`
    pixels. Framed by axes with tick labels and an optional title. */
std::string trajectorySvg(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                          double extent = 640);

/// write through a temporary file in the same directory and rename over the target
void writeFileAtomic(const std::string& path, const std::string& content);

}  // namespace fieldline::cli
