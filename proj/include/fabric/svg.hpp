#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace fabric {

/// Self-contained SVG line plot: axes, ticks, polylines, legend. Plots are a
/// viewing convenience; CSVs are the data of record. Non-finite points are
/// dropped (how the density singularity at x = 0 shows up in point mode).
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, int width = 900,
            int height = 560)
        : title_(std::move(title)),
          xlabel_(std::move(xlabel)),
          ylabel_(std::move(ylabel)),
          width_(width),
          height_(height) {}

    void add_series(std::vector<double> x, std::vector<double> y, std::string color,
                    std::string label) {
        series_.push_back({std::move(x), std::move(y), std::move(color), std::move(label)});
    }

    void write(std::ostream& os) const {
        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const auto& s : series_) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
        if (!(xmax > xmin)) {
            xmin = 0.0;
            xmax = 1.0;
        }
        if (!(ymax > ymin)) {
            ymin = 0.0;
            ymax = 1.0;
        }
        const double pad_y = 0.05 * (ymax - ymin);
        ymin -= pad_y;
        ymax += pad_y;

        const int ml = 70, mr = 20, mt = 40, mb = 50;
        const double pw = width_ - ml - mr, ph = height_ - mt - mb;
        auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
        auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
           << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
        os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        os << "<text x=\"" << width_ / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           << "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";
        os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
           << "\" fill=\"none\" stroke=\"black\"/>\n";

        for (int i = 0; i <= 5; ++i) {
            const double fx = xmin + (xmax - xmin) * i / 5.0;
            const double fy = ymin + (ymax - ymin) * i / 5.0;
            os << "<line x1=\"" << fmt(px(fx)) << "\" y1=\"" << mt + ph << "\" x2=\"" << fmt(px(fx))
               << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << mt + ph + 20
               << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
               << fmt_tick(fx) << "</text>\n";
            os << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt(py(fy)) << "\" x2=\"" << ml
               << "\" y2=\"" << fmt(py(fy)) << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(py(fy) + 4)
               << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
               << fmt_tick(fy) << "</text>\n";
        }
        os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height_ - 12
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel_
           << "</text>\n";
        os << "<text x=\"18\" y=\"" << mt + ph / 2
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           << "transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">" << ylabel_ << "</text>\n";

        int legend_y = mt + 16;
        for (const auto& s : series_) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            bool pen_down = false;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                if (pen_down) os << ' ';
                os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
                pen_down = true;
            }
            os << "\"/>\n";
            if (!s.label.empty()) {
                os << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << legend_y << "\" x2=\""
                   << ml + pw - 120 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
                   << "\" stroke-width=\"1.5\"/>\n";
                os << "<text x=\"" << ml + pw - 114 << "\" y=\"" << legend_y + 4
                   << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
                legend_y += 18;
            }
        }
        os << "</svg>\n";
    }

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        std::string label;
    };

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return buf;
    }

    static std::string fmt_tick(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", v);
        return buf;
    }

    std::string title_, xlabel_, ylabel_;
    int width_, height_;
    std::vector<Series> series_;
};

}  // namespace fabric
