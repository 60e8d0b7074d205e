#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iil/errors.hpp"
#include "iil/metrics.hpp"

namespace iil {

// Mean learning curve with a std band, aggregated over same-config runs.
struct AggregatedCurve {
    std::string label;
    std::vector<double> xs;      // wall steps
    std::vector<double> mean;    // mean true return across runs
    std::vector<double> stddev;  // sample std (zero for a single run)
};

// Runs grouped under one label are aligned by row index and truncated to the
// shortest run.
inline AggregatedCurve aggregate_runs(const std::string& label,
                                      const std::vector<std::vector<MetricsRow>>& runs) {
    if (runs.empty()) throw DimensionError("aggregate_runs: no runs");
    std::size_t len = runs.front().size();
    for (const auto& r : runs) len = std::min(len, r.size());
    if (len == 0) throw DimensionError("aggregate_runs: empty run for " + label);
    AggregatedCurve out;
    out.label = label;
    const double n = static_cast<double>(runs.size());
    for (std::size_t i = 0; i < len; ++i) {
        out.xs.push_back(static_cast<double>(runs.front()[i].step));
        double m = 0.0;
        for (const auto& r : runs) m += r[i].mean_true_return;
        m /= n;
        double s = 0.0;
        if (runs.size() > 1) {
            for (const auto& r : runs)
                s += (r[i].mean_true_return - m) * (r[i].mean_true_return - m);
            s = std::sqrt(s / (n - 1.0));
        }
        out.mean.push_back(m);
        out.stddev.push_back(s);
    }
    return out;
}

// Label for a metrics file: basename minus extension minus a _seed<k> suffix.
inline std::string curve_label(const std::string& path) {
    std::string name = path;
    const std::size_t slash = name.find_last_of("/\\");
    if (slash != std::string::npos) name = name.substr(slash + 1);
    if (name.size() > 4 && name.substr(name.size() - 4) == ".csv")
        name = name.substr(0, name.size() - 4);
    const std::size_t seed_pos = name.rfind("_seed");
    if (seed_pos != std::string::npos) {
        bool digits = seed_pos + 5 < name.size();
        for (std::size_t i = seed_pos + 5; i < name.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
        if (digits) name = name.substr(0, seed_pos);
    }
    return name;
}

// Pixel mapping shared by the renderer and its tests.
struct PlotTransform {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    double left = 70.0, right = 700.0, top = 20.0, bottom = 430.0;

    double px(double x) const {
        const double span = x_hi - x_lo;
        return left + (x - x_lo) / (span > 0 ? span : 1.0) * (right - left);
    }
    double py(double y) const {
        const double span = y_hi - y_lo;
        return bottom - (y - y_lo) / (span > 0 ? span : 1.0) * (bottom - top);
    }
};

inline PlotTransform make_transform(const std::vector<AggregatedCurve>& curves,
                                    std::optional<double> demo_line,
                                    std::optional<double> expert_line) {
    PlotTransform t;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& c : curves) {
        for (double x : c.xs) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
        }
        for (std::size_t i = 0; i < c.mean.size(); ++i) {
            y_lo = std::min(y_lo, c.mean[i] - c.stddev[i]);
            y_hi = std::max(y_hi, c.mean[i] + c.stddev[i]);
        }
    }
    if (demo_line) {
        y_lo = std::min(y_lo, *demo_line);
        y_hi = std::max(y_hi, *demo_line);
    }
    if (expert_line) {
        y_lo = std::min(y_lo, *expert_line);
        y_hi = std::max(y_hi, *expert_line);
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi - y_lo < 1e-12) {
        y_lo -= 1.0;
        y_hi += 1.0;
    } else {
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
    }
    t.x_lo = x_lo;
    t.x_hi = x_hi;
    t.y_lo = y_lo;
    t.y_hi = y_hi;
    return t;
}

namespace detail {

inline std::string svg_num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

inline const char* curve_color(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b", "#e377c2"};
    return colors[i % (sizeof(colors) / sizeof(colors[0]))];
}

}  // namespace detail

// Pure-text SVG: mean polyline and std-band polygon per curve, optional
// dashed reference lines for the demonstration and expert means.
inline std::string render_svg(const std::vector<AggregatedCurve>& curves,
                              std::optional<double> demo_line,
                              std::optional<double> expert_line) {
    if (curves.empty()) throw DimensionError("render_svg: no curves");
    const PlotTransform t = make_transform(curves, demo_line, expert_line);
    using detail::svg_num;
    using detail::xml_escape;

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
          "viewBox=\"0 0 720 480\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"white\"/>\n";
    os << "<rect x=\"" << svg_num(t.left) << "\" y=\"" << svg_num(t.top) << "\" width=\""
       << svg_num(t.right - t.left) << "\" height=\"" << svg_num(t.bottom - t.top)
       << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // Axis ticks.
    for (int k = 0; k <= 5; ++k) {
        const double fx = t.x_lo + (t.x_hi - t.x_lo) * k / 5.0;
        const double px = t.px(fx);
        os << "<line x1=\"" << svg_num(px) << "\" y1=\"" << svg_num(t.bottom) << "\" x2=\""
           << svg_num(px) << "\" y2=\"" << svg_num(t.bottom + 5) << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << svg_num(px) << "\" y=\"" << svg_num(t.bottom + 18)
           << "\" font-size=\"11\" text-anchor=\"middle\">" << svg_num(fx) << "</text>\n";
        const double fy = t.y_lo + (t.y_hi - t.y_lo) * k / 5.0;
        const double py = t.py(fy);
        os << "<line x1=\"" << svg_num(t.left - 5) << "\" y1=\"" << svg_num(py) << "\" x2=\""
           << svg_num(t.left) << "\" y2=\"" << svg_num(py) << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << svg_num(t.left - 8) << "\" y=\"" << svg_num(py + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">" << svg_num(fy) << "</text>\n";
    }
    os << "<text x=\"385\" y=\"470\" font-size=\"12\" text-anchor=\"middle\">steps</text>\n";
    os << "<text x=\"16\" y=\"225\" font-size=\"12\" text-anchor=\"middle\" "
          "transform=\"rotate(-90 16 225)\">average return</text>\n";

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const AggregatedCurve& c = curves[ci];
        const char* color = detail::curve_color(ci);
        // Band polygon: upper edge left-to-right, lower edge right-to-left.
        os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < c.xs.size(); ++i)
            os << svg_num(t.px(c.xs[i])) << "," << svg_num(t.py(c.mean[i] + c.stddev[i])) << " ";
        for (std::size_t i = c.xs.size(); i-- > 0;)
            os << svg_num(t.px(c.xs[i])) << "," << svg_num(t.py(c.mean[i] - c.stddev[i]))
               << (i == 0 ? "" : " ");
        os << "\"/>\n";
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.xs.size(); ++i)
            os << svg_num(t.px(c.xs[i])) << "," << svg_num(t.py(c.mean[i]))
               << (i + 1 == c.xs.size() ? "" : " ");
        os << "\"/>\n";
        os << "<text x=\"" << svg_num(t.left + 10) << "\" y=\""
           << svg_num(t.top + 16 + 16 * static_cast<double>(ci)) << "\" font-size=\"12\" fill=\""
           << color << "\">" << xml_escape(c.label) << "</text>\n";
    }

    auto reference = [&](double y, const char* color, const char* name) {
        os << "<line x1=\"" << svg_num(t.left) << "\" y1=\"" << svg_num(t.py(y)) << "\" x2=\""
           << svg_num(t.right) << "\" y2=\"" << svg_num(t.py(y)) << "\" stroke=\"" << color
           << "\" stroke-dasharray=\"6,4\"/>\n";
        os << "<text x=\"" << svg_num(t.right - 4) << "\" y=\"" << svg_num(t.py(y) - 4)
           << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << color << "\">" << name
           << "</text>\n";
    };
    if (demo_line) reference(*demo_line, "#555555", "demonstration");
    if (expert_line) reference(*expert_line, "#2255cc", "expert");

    os << "</svg>\n";
    return os.str();
}

}  // namespace iil
