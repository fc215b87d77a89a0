#ifndef PRMIX_SVG_HPP
#define PRMIX_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "prmix/errors.hpp"

namespace prmix::svg {

// Fixed-precision coordinates keep the output byte-stable across runs.
inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

class Canvas {
public:
    Canvas(double width, double height) : width_(width), height_(height) {}

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0) {
        body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
              << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
              << fmt(stroke_width) << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none") {
        body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
              << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
              << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill) {
        body_ << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r)
              << "\" fill=\"" << fill << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double stroke_width = 1.5) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
              << fmt(stroke_width) << "\" points=\"";
        for (const auto& [x, y] : pts) body_ << fmt(x) << ',' << fmt(y) << ' ';
        body_ << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start") {
        body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << s
              << "</text>\n";
    }

    std::string str() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width_)
            << "\" height=\"" << fmt(height_) << "\" viewBox=\"0 0 " << fmt(width_) << ' '
            << fmt(height_) << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

/// Five-number summary with 1.5 IQR whiskers clamped to the data.
struct BoxStats {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
    double whisker_lo = 0.0, whisker_hi = 0.0;
    std::vector<double> outliers;
};

/// Linear-interpolation quantile of sorted values (R type 7).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ConfigError("quantile of empty sample");
    const double idx = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double t = idx - static_cast<double>(lo);
    return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

inline BoxStats box_stats(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    BoxStats s;
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_lo = s.q3;
    s.whisker_hi = s.q1;
    for (double v : values) {
        if (v < lo_fence || v > hi_fence) {
            s.outliers.push_back(v);
        } else {
            s.whisker_lo = std::min(s.whisker_lo, v);
            s.whisker_hi = std::max(s.whisker_hi, v);
        }
    }
    return s;
}

/// Side-by-side boxplots for named groups.
inline std::string boxplot(const std::string& title,
                           const std::vector<std::string>& labels,
                           const std::vector<std::vector<double>>& groups) {
    if (labels.size() != groups.size() || groups.empty()) {
        throw ConfigError("boxplot: labels/groups mismatch");
    }
    const double width = 160.0 + 120.0 * static_cast<double>(groups.size());
    const double height = 360.0;
    const double top = 48.0, bottom = 48.0, left = 64.0;
    Canvas c(width, height);

    double vmin = groups.front().front();
    double vmax = vmin;
    std::vector<BoxStats> stats;
    for (const auto& g : groups) {
        if (g.empty()) throw ConfigError("boxplot: empty group");
        stats.push_back(box_stats(g));
        for (double v : g) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    if (vmax == vmin) vmax = vmin + 1.0;
    const double pad = 0.05 * (vmax - vmin);
    vmin -= pad;
    vmax += pad;
    auto ypix = [&](double v) {
        return top + (vmax - v) / (vmax - vmin) * (height - top - bottom);
    };

    c.text(width / 2.0, 24.0, title, 14, "middle");
    c.line(left, top, left, height - bottom, "black");
    for (int k = 0; k <= 4; ++k) {
        const double v = vmin + (vmax - vmin) * k / 4.0;
        char lab[48];
        std::snprintf(lab, sizeof(lab), "%.3g", v);
        c.line(left - 4.0, ypix(v), left, ypix(v), "black");
        c.text(left - 8.0, ypix(v) + 4.0, lab, 10, "end");
    }

    for (std::size_t i = 0; i < groups.size(); ++i) {
        const double cx = left + 72.0 + 120.0 * static_cast<double>(i);
        const double bw = 56.0;
        const BoxStats& s = stats[i];
        c.line(cx, ypix(s.whisker_lo), cx, ypix(s.q1), "black");
        c.line(cx, ypix(s.q3), cx, ypix(s.whisker_hi), "black");
        c.line(cx - bw / 4.0, ypix(s.whisker_lo), cx + bw / 4.0, ypix(s.whisker_lo), "black");
        c.line(cx - bw / 4.0, ypix(s.whisker_hi), cx + bw / 4.0, ypix(s.whisker_hi), "black");
        c.rect(cx - bw / 2.0, ypix(s.q3), bw, ypix(s.q1) - ypix(s.q3), "#9ecae1", "black");
        c.line(cx - bw / 2.0, ypix(s.median), cx + bw / 2.0, ypix(s.median), "black", 2.0);
        for (double v : s.outliers) c.circle(cx, ypix(v), 2.0, "black");
        c.text(cx, height - bottom + 18.0, labels[i], 11, "middle");
    }
    return c.str();
}

struct Curve {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;  // (x, density)
};

/// Histogram (given bin edges and per-bin densities) with density curves on
/// top. Used for the fitted-density overlays.
inline std::string density_overlay(const std::string& title,
                                   const std::vector<double>& bin_edges,
                                   const std::vector<double>& bin_density,
                                   const std::vector<Curve>& curves) {
    const double width = 640.0, height = 420.0;
    const double top = 48.0, bottom = 52.0, left = 64.0, right = 24.0;
    Canvas c(width, height);

    double xmax = bin_edges.empty() ? 1.0 : bin_edges.back();
    double ymax = 0.0;
    for (double d : bin_density) ymax = std::max(ymax, d);
    for (const auto& cur : curves) {
        for (const auto& [x, y] : cur.points) {
            xmax = std::max(xmax, x);
            ymax = std::max(ymax, y);
        }
    }
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.08;

    auto xp = [&](double x) { return left + x / xmax * (width - left - right); };
    auto yp = [&](double y) { return top + (ymax - y) / ymax * (height - top - bottom); };

    c.text(width / 2.0, 24.0, title, 14, "middle");
    for (std::size_t b = 0; b + 1 < bin_edges.size(); ++b) {
        const double x0 = xp(bin_edges[b]);
        const double x1 = xp(bin_edges[b + 1]);
        c.rect(x0, yp(bin_density[b]), x1 - x0, yp(0.0) - yp(bin_density[b]), "#dddddd",
               "#888888");
    }
    c.line(left, yp(0.0), width - right, yp(0.0), "black");
    c.line(left, top, left, yp(0.0), "black");
    for (int k = 0; k <= 4; ++k) {
        const double v = ymax * k / 4.0;
        char lab[48];
        std::snprintf(lab, sizeof(lab), "%.3g", v);
        c.text(left - 8.0, yp(v) + 4.0, lab, 10, "end");
        const double x = xmax * k / 4.0;
        std::snprintf(lab, sizeof(lab), "%.3g", x);
        c.text(xp(x), height - bottom + 16.0, lab, 10, "middle");
    }

    double legend_y = top + 8.0;
    for (const auto& cur : curves) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(cur.points.size());
        for (const auto& [x, y] : cur.points) pts.emplace_back(xp(x), yp(std::min(y, ymax)));
        c.polyline(pts, cur.color, 1.8);
        c.line(width - right - 120.0, legend_y, width - right - 96.0, legend_y, cur.color, 2.0);
        c.text(width - right - 90.0, legend_y + 4.0, cur.label, 11);
        legend_y += 16.0;
    }
    return c.str();
}

} // namespace prmix::svg

#endif
