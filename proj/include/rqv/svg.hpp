#pragma once

#include <string>
#include <vector>

namespace rqv {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Highlighted point, drawn as an open red circle.
struct Marker {
    double x = 0.0;
    double y = 0.0;
};

struct ChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

/// Standalone SVG line chart with axes, ticks and a legend. Points that
/// cannot be shown (non-finite, or non-positive on a log axis) are skipped
/// and break the line.
std::string line_chart(const std::vector<Series>& series, const std::vector<Marker>& markers,
                       const ChartOptions& options);

}  // namespace rqv
