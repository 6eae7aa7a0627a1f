#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cyberdyn {

struct ChartSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};

// Self-contained deterministic line chart; fixed-precision coordinates so the
// same inputs always produce byte-identical output.
inline void write_line_chart(const std::string& path, const std::vector<ChartSeries>& series,
                             const std::string& title, const std::string& x_label,
                             const std::string& y_label) {
    if (series.empty()) throw std::invalid_argument("chart needs at least one series");
    const int width = 640, height = 400;
    const int ml = 56, mr = 16, mt = 32, mb = 44;
    const double px = ml, py = mt, pw = width - ml - mr, ph = height - mt - mb;

    double x_lo = series[0].xs.front(), x_hi = x_lo, y_lo = 0.0, y_hi = 0.0;
    for (const auto& s : series) {
        for (double x : s.xs) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
        }
        for (double y : s.ys) {
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    y_hi += 0.05 * (y_hi - y_lo);

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write chart: " + path);
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        return std::string(buf);
    };
    auto tx = [&](double x) { return px + pw * (x - x_lo) / (x_hi - x_lo); };
    auto ty = [&](double y) { return py + ph * (1.0 - (y - y_lo) / (y_hi - y_lo)); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" << title << "</text>\n";

    // axes with four ticks per side
    out << "<g stroke=\"#333\" stroke-width=\"1\" fill=\"none\">\n";
    out << "<path d=\"M" << fmt(px) << ' ' << fmt(py) << " L" << fmt(px) << ' ' << fmt(py + ph)
        << " L" << fmt(px + pw) << ' ' << fmt(py + ph) << "\"/>\n";
    out << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = x_lo + (x_hi - x_lo) * k / 4.0;
        double yv = y_lo + (y_hi - y_lo) * k / 4.0;
        out << "<text x=\"" << fmt(tx(xv)) << "\" y=\"" << fmt(py + ph + 16)
            << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
        out << "<text x=\"" << fmt(px - 6) << "\" y=\"" << fmt(ty(yv) + 4)
            << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"14\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << height / 2 << ")\">" << y_label
        << "</text>\n</g>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        out << "<polyline fill=\"none\" stroke=\"" << palette[s % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        // cap the emitted points so charts stay small
        std::size_t stride = std::max<std::size_t>(1, ser.xs.size() / 800);
        for (std::size_t k = 0; k < ser.xs.size(); k += stride)
            out << fmt(tx(ser.xs[k])) << ',' << fmt(ty(ser.ys[k])) << ' ';
        out << fmt(tx(ser.xs.back())) << ',' << fmt(ty(ser.ys.back()));
        out << "\"/>\n";
        out << "<text x=\"" << fmt(px + pw - 4) << "\" y=\"" << fmt(py + 14 + 14 * double(s))
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
            << palette[s % 8] << "\">" << ser.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace cyberdyn
