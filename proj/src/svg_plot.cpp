#include "slackal/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace slackal {

namespace {

constexpr double panel_w = 480, panel_h = 340;
constexpr double margin_l = 64, margin_r = 16, margin_t = 32, margin_b = 48;

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(ch);
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::string render_svg(const std::vector<PlotPanel>& panels, int columns) {
    columns = std::max(1, columns);
    const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << panel_w * columns << "\" height=\""
        << panel_h * std::max(rows, 1) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const PlotPanel& panel = panels[pi];
        const double ox = panel_w * static_cast<double>(pi % columns);
        const double oy = panel_h * static_cast<double>(pi / columns);
        const double x0 = ox + margin_l, x1 = ox + panel_w - margin_r;
        const double y0 = oy + panel_h - margin_b, y1 = oy + margin_t;

        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const PlotSeries& s : panel.series) {
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
        if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
        if (xmax - xmin <= 0) xmax = xmin + 1;
        if (ymax - ymin <= 0) {
            const double pad = std::max(std::abs(ymin) * 0.05, 1e-3);
            ymin -= pad;
            ymax += pad;
        }
        const double ypad = 0.04 * (ymax - ymin);
        ymin -= ypad;
        ymax += ypad;
        auto px = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
        auto py = [&](double y) { return y0 + (y - ymin) / (ymax - ymin) * (y1 - y0); };

        svg << "<g class=\"panel\" id=\"panel" << pi << "\">\n";
        svg << "<text x=\"" << coord(ox + panel_w / 2) << "\" y=\"" << coord(oy + 18)
            << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.title) << "</text>\n";
        svg << "<rect x=\"" << coord(x0) << "\" y=\"" << coord(y1) << "\" width=\"" << coord(x1 - x0)
            << "\" height=\"" << coord(y0 - y1) << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double xv = xmin + (xmax - xmin) * t / 4.0;
            const double yv = ymin + (ymax - ymin) * t / 4.0;
            svg << "<text x=\"" << coord(px(xv)) << "\" y=\"" << coord(y0 + 14) << "\" text-anchor=\"middle\">"
                << fmt(xv) << "</text>\n";
            svg << "<text x=\"" << coord(x0 - 4) << "\" y=\"" << coord(py(yv) + 4) << "\" text-anchor=\"end\">"
                << fmt(yv) << "</text>\n";
        }
        svg << "<text x=\"" << coord((x0 + x1) / 2) << "\" y=\"" << coord(y0 + 32) << "\" text-anchor=\"middle\">"
            << escape(panel.x_label) << "</text>\n";
        svg << "<text transform=\"translate(" << coord(ox + 14) << "," << coord((y0 + y1) / 2)
            << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";

        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const PlotSeries& s = panel.series[si];
            const char* color = palette[si % std::size(palette)];
            svg << "<polyline class=\"series\" data-label=\"" << escape(s.label) << "\" fill=\"none\" stroke=\""
                << color << "\" stroke-width=\"1.6\" points=\"";
            bool first = true;
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                if (!first) svg << ' ';
                svg << coord(px(s.x[i])) << ',' << coord(py(s.y[i]));
                first = false;
            }
            svg << "\"/>\n";
            const double ly = y1 + 14 + 14 * static_cast<double>(si);
            svg << "<line x1=\"" << coord(x1 - 130) << "\" y1=\"" << coord(ly - 4) << "\" x2=\"" << coord(x1 - 112)
                << "\" y2=\"" << coord(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << coord(x1 - 108) << "\" y=\"" << coord(ly) << "\">" << escape(s.label) << "</text>\n";
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace slackal
