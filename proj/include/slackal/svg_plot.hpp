#pragma once

#include <string>
#include <vector>

namespace slackal {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;  // non-finite points are dropped
};

struct PlotPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

// Renders a grid of line-chart panels as a standalone SVG document. Every
// series becomes exactly one <polyline> in its panel.
[[nodiscard]] std::string render_svg(const std::vector<PlotPanel>& panels, int columns = 2);

} // namespace slackal
