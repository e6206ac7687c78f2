#include "hedge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hedge {
namespace svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kPaletteSize = 8;
constexpr int kMarginLeft = 64, kMarginRight = 16, kMarginTop = 40, kMarginBottom = 48;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

std::string header(int width, int height, const std::string& title) {
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + std::to_string(width / 2) +
           "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" + escape(title) +
           "</text>\n";
    return out;
}

std::string axes(int width, int height) {
    const int x0 = kMarginLeft, x1 = width - kMarginRight;
    const int y0 = kMarginTop, y1 = height - kMarginBottom;
    std::string out;
    out += "<line x1=\"" + std::to_string(x0) + "\" y1=\"" + std::to_string(y1) +
           "\" x2=\"" + std::to_string(x1) + "\" y2=\"" + std::to_string(y1) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + std::to_string(x0) + "\" y1=\"" + std::to_string(y0) +
           "\" x2=\"" + std::to_string(x0) + "\" y2=\"" + std::to_string(y1) +
           "\" stroke=\"black\"/>\n";
    return out;
}

std::string legend(const std::vector<std::string>& labels, int width) {
    std::string out;
    int y = kMarginTop + 4;
    for (size_t i = 0; i < labels.size(); ++i, y += 16) {
        const char* color = kPalette[i % kPaletteSize];
        out += "<rect x=\"" + std::to_string(width - kMarginRight - 150) + "\" y=\"" +
               std::to_string(y - 9) + "\" width=\"10\" height=\"10\" fill=\"" + color +
               "\"/>\n";
        out += "<text x=\"" + std::to_string(width - kMarginRight - 136) + "\" y=\"" +
               std::to_string(y) + "\" font-size=\"12\">" + escape(labels[i]) +
               "</text>\n";
    }
    return out;
}

}  // namespace

std::string line_chart(const std::string& title, const std::vector<std::string>& x_labels,
                       const std::vector<Series>& series, int width, int height) {
    if (series.empty()) throw ShapeError("line chart: no series");
    const size_t n = x_labels.size();
    if (n < 2) throw ShapeError("line chart: need at least two points");
    for (const auto& s : series)
        if (s.y.size() != n)
            throw ShapeError("line chart: series '" + s.label + "' has " +
                             std::to_string(s.y.size()) + " points, axis has " +
                             std::to_string(n));

    double lo = series[0].y[0], hi = lo;
    for (const auto& s : series)
        for (double v : s.y) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double plot_w = width - kMarginLeft - kMarginRight;
    const double plot_h = height - kMarginTop - kMarginBottom;
    auto px = [&](size_t i) { return kMarginLeft + plot_w * double(i) / double(n - 1); };
    auto py = [&](double v) { return kMarginTop + plot_h * (hi - v) / (hi - lo); };

    std::string out = header(width, height, title) + axes(width, height);
    for (int g = 0; g <= 4; ++g) {  // horizontal gridlines + y tick labels
        const double v = lo + (hi - lo) * g / 4.0;
        out += "<line x1=\"" + std::to_string(kMarginLeft) + "\" y1=\"" + num(py(v)) +
               "\" x2=\"" + std::to_string(width - kMarginRight) + "\" y2=\"" + num(py(v)) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + std::to_string(kMarginLeft - 6) + "\" y=\"" +
               num(py(v) + 4) + "\" font-size=\"11\" text-anchor=\"end\">" + tick(v) +
               "</text>\n";
    }
    const size_t step = std::max<size_t>(1, (n - 1) / 7);  // at most 8 x labels
    for (size_t i = 0; i < n; i += step)
        out += "<text x=\"" + num(px(i)) + "\" y=\"" +
               std::to_string(height - kMarginBottom + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + escape(x_labels[i]) +
               "</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        std::string pts;
        for (size_t i = 0; i < n; ++i)
            pts += num(px(i)) + "," + num(py(series[s].y[i])) + " ";
        out += "<polyline fill=\"none\" stroke=\"" +
               std::string(kPalette[s % kPaletteSize]) + "\" stroke-width=\"1.5\" points=\"" +
               pts + "\"/>\n";
    }
    std::vector<std::string> labels;
    for (const auto& s : series) labels.push_back(s.label);
    out += legend(labels, width);
    out += "</svg>\n";
    return out;
}

std::string stacked_bars(const std::string& title, const std::vector<std::string>& groups,
                         const std::vector<Series>& segments, int width, int height) {
    if (segments.empty()) throw ShapeError("bar chart: no segments");
    const size_t n = groups.size();
    if (n == 0) throw ShapeError("bar chart: no groups");
    for (const auto& s : segments)
        if (s.y.size() != n)
            throw ShapeError("bar chart: segment '" + s.label + "' has " +
                             std::to_string(s.y.size()) + " values, expected " +
                             std::to_string(n));

    double hi = 0.0;
    for (size_t g = 0; g < n; ++g) {
        double total = 0.0;
        for (const auto& s : segments) total += std::max(0.0, s.y[g]);
        hi = std::max(hi, total);
    }
    if (hi <= 0.0) hi = 1.0;

    const double plot_w = width - kMarginLeft - kMarginRight;
    const double plot_h = height - kMarginTop - kMarginBottom;
    const double slot = plot_w / double(n);
    const double bar_w = slot * 0.7;
    const double base_y = height - kMarginBottom;

    std::string out = header(width, height, title) + axes(width, height);
    for (int g = 0; g <= 4; ++g) {
        const double v = hi * g / 4.0;
        const double y = base_y - plot_h * v / hi;
        out += "<text x=\"" + std::to_string(kMarginLeft - 6) + "\" y=\"" + num(y + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + tick(v) + "</text>\n";
    }
    for (size_t g = 0; g < n; ++g) {
        const double x = kMarginLeft + slot * g + (slot - bar_w) / 2.0;
        double acc = 0.0;
        for (size_t s = 0; s < segments.size(); ++s) {
            const double v = std::max(0.0, segments[s].y[g]);
            if (v <= 0.0) continue;
            const double y_top = base_y - plot_h * (acc + v) / hi;
            out += "<rect x=\"" + num(x) + "\" y=\"" + num(y_top) + "\" width=\"" +
                   num(bar_w) + "\" height=\"" + num(plot_h * v / hi) + "\" fill=\"" +
                   kPalette[s % kPaletteSize] + "\"/>\n";
            acc += v;
        }
        out += "<text x=\"" + num(x + bar_w / 2.0) + "\" y=\"" +
               std::to_string(height - kMarginBottom + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + escape(groups[g]) +
               "</text>\n";
    }
    std::vector<std::string> labels;
    for (const auto& s : segments) labels.push_back(s.label);
    out += legend(labels, width);
    out += "</svg>\n";
    return out;
}

}  // namespace svg
}  // namespace hedge
