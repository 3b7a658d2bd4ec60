#include "yodar/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace yodar {

namespace {

const char* kPalette[] = {"#b9a7d0", "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3"};

std::string fmt(double v, int prec = 1) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

}  // namespace

std::string svg_grouped_bars(const std::vector<std::string>& series_names,
                             const std::vector<std::vector<double>>& series_values,
                             const std::vector<std::string>& bin_labels, const std::string& title) {
    const int width = 960, height = 420;
    const int ml = 60, mr = 20, mt = 40, mb = 60;
    double plot_w = width - ml - mr, plot_h = height - mt - mb;
    double vmax = 1.0;
    for (const auto& s : series_values)
        for (double v : s) vmax = std::max(vmax, v);

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << title << "</text>\n";
    std::size_t n_bins = bin_labels.size();
    std::size_t n_series = series_names.size();
    double group_w = plot_w / static_cast<double>(n_bins);
    double bar_w = group_w * 0.8 / static_cast<double>(n_series);
    for (std::size_t b = 0; b < n_bins; ++b) {
        for (std::size_t s = 0; s < n_series; ++s) {
            double v = series_values[s][b];
            double hpx = v / vmax * plot_h;
            double x = ml + group_w * static_cast<double>(b) + group_w * 0.1 +
                       bar_w * static_cast<double>(s);
            double y = mt + plot_h - hpx;
            out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(bar_w)
                << "\" height=\"" << fmt(hpx) << "\" fill=\"" << kPalette[s % 6] << "\"/>\n";
        }
        out << "<text x=\"" << fmt(ml + group_w * (static_cast<double>(b) + 0.5)) << "\" y=\""
            << height - mb + 18 << "\" text-anchor=\"middle\" font-size=\"11\">" << bin_labels[b]
            << "</text>\n";
    }
    // y axis with 5 ticks
    for (int i = 0; i <= 5; ++i) {
        double v = vmax * i / 5.0;
        double y = mt + plot_h - plot_h * i / 5.0;
        out << "<line x1=\"" << ml << "\" y1=\"" << fmt(y) << "\" x2=\"" << width - mr
            << "\" y2=\"" << fmt(y) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\" "
            << "font-size=\"11\">" << fmt(v, 0) << "</text>\n";
    }
    // legend
    for (std::size_t s = 0; s < n_series; ++s) {
        double x = ml + 10 + 150.0 * static_cast<double>(s);
        out << "<rect x=\"" << fmt(x) << "\" y=\"" << mt - 10 << "\" width=\"12\" height=\"12\" "
            << "fill=\"" << kPalette[s % 6] << "\"/>\n";
        out << "<text x=\"" << fmt(x + 16) << "\" y=\"" << mt + 1 << "\" font-size=\"12\">"
            << series_names[s] << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string svg_heatmap(const Heatmap& h, const std::string& title, bool signed_scale) {
    const int cell = 44, ml = 70, mt = 44, mb = 30, mr = 20;
    int width = ml + mr + cell * h.n_col_bins;
    int height = mt + mb + cell * h.n_dist_bins;
    double vmax = 1e-12;
    for (double v : h.cells)
        if (std::isfinite(v)) vmax = std::max(vmax, std::abs(v));

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
        << title << "</text>\n";
    for (int d = 0; d < h.n_dist_bins; ++d) {
        for (int c = 0; c < h.n_col_bins; ++c) {
            double v = h.at(d, c);
            int x = ml + c * cell;
            // nearest distances at the bottom row
            int y = mt + (h.n_dist_bins - 1 - d) * cell;
            std::string fill = "#f5f5f5";
            std::string label;
            if (std::isfinite(v)) {
                double a = std::min(1.0, std::abs(v) / vmax);
                int shade = static_cast<int>(255.0 - 195.0 * a);
                char buf[8];
                if (signed_scale && v < 0.0)
                    std::snprintf(buf, sizeof(buf), "#%02xff%02x", shade, shade);  // green = drop
                else
                    std::snprintf(buf, sizeof(buf), "#%02x%02xff", shade, shade);
                fill = buf;
                label = std::abs(v) < 10.0 && std::floor(v) != v ? fmt(v, 2) : fmt(v, 0);
            }
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
                << cell << "\" fill=\"" << fill << "\" stroke=\"#fff\"/>\n";
            if (!label.empty())
                out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
                    << "\" text-anchor=\"middle\" font-size=\"10\">" << label << "</text>\n";
        }
        out << "<text x=\"" << ml - 6 << "\" y=\""
            << mt + (h.n_dist_bins - 1 - d) * cell + cell / 2 + 4
            << "\" text-anchor=\"end\" font-size=\"10\">" << d * 10 << "-" << (d + 1) * 10
            << "m</text>\n";
    }
    for (int c = 0; c < h.n_col_bins; ++c)
        out << "<text x=\"" << ml + c * cell + cell / 2 << "\" y=\"" << height - 10
            << "\" text-anchor=\"middle\" font-size=\"10\">" << (c + 1) * 100 << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace yodar
