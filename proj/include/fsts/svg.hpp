#pragma once

#include <algorithm>
#include <limits>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsts/infoplane.hpp"
#include "fsts/text.hpp"

namespace fsts {
namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string svg_num(double v) { return double_to_string_fixed(v, 2); }

// Cluster palette (Okabe-Ito, skipping black).
inline const char* cluster_color(std::size_t c) {
    static constexpr const char* palette[] = {"#0072B2", "#D55E00", "#009E73", "#CC79A7",
                                              "#E69F00", "#56B4E9", "#F0E442", "#999999"};
    return palette[c % 8];
}

struct axis_scale {
    double lo, hi;          // data range (log10 units for log axes)
    double pixel_lo, pixel_hi;
    double to_pixel(double v) const {
        return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo);
    }
};

/// Tick positions with 1-2-5 mantissas covering a log10 range.
inline std::vector<double> log_ticks(double lo_log, double hi_log) {
    std::vector<double> ticks;
    const int e_lo = static_cast<int>(std::floor(lo_log)) - 1;
    const int e_hi = static_cast<int>(std::ceil(hi_log)) + 1;
    static constexpr double mantissas[] = {1.0, 2.0, 5.0};
    for (int e = e_lo; e <= e_hi; ++e) {
        for (double mant : mantissas) {
            const double v = std::log10(mant) + e;
            if (v >= lo_log - 1e-9 && v <= hi_log + 1e-9) ticks.push_back(v);
        }
    }
    // Thin out when crowded: prefer decades, then 1-2-5.
    if (ticks.size() > 8) {
        std::vector<double> decades;
        for (double t : ticks)
            if (std::abs(t - std::round(t)) < 1e-9) decades.push_back(t);
        if (decades.size() >= 2) return decades;
    }
    return ticks;
}

inline std::string tick_label(double log_value) {
    const double v = std::pow(10.0, log_value);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

} // namespace detail

/// Scatter of (SEP, FIM) pairs on log-log axes, labeled by series id and
/// colored by cluster. The dashed line marks the isoperimetric boundary
/// sep * fim = 1 bounding the reachable region.
inline std::string fs_plane_svg(std::span<const fs_point_result> points,
                                std::span<const std::size_t> labels, std::size_t k,
                                std::string_view title) {
    const double width = 760, height = 560;
    const double ml = 90, mr = 160, mt = 50, mb = 70;

    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = max_x;
    for (const auto& p : points) {
        min_x = std::min(min_x, std::log10(p.sep));
        max_x = std::max(max_x, std::log10(p.sep));
        min_y = std::min(min_y, std::log10(p.fim));
        max_y = std::max(max_y, std::log10(p.fim));
    }
    if (points.empty()) { min_x = min_y = -1.0; max_x = max_y = 1.0; }
    auto pad = [](double& lo, double& hi) {
        double span = hi - lo;
        if (span < 0.4) {
            const double mid = (lo + hi) / 2.0;
            lo = mid - 0.2;
            hi = mid + 0.2;
            span = 0.4;
        }
        lo -= 0.08 * span;
        hi += 0.08 * span;
    };
    pad(min_x, max_x);
    pad(min_y, max_y);

    detail::axis_scale xs{min_x, max_x, ml, width - mr};
    detail::axis_scale ys{min_y, max_y, height - mb, mt}; // y grows upward

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(width) +
           "\" height=\"" + detail::svg_num(height) + "\" viewBox=\"0 0 " +
           detail::svg_num(width) + " " + detail::svg_num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + detail::svg_num(width / 2) +
           "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"17\">" +
           detail::xml_escape(title) + "</text>\n";

    for (double t : detail::log_ticks(min_x, max_x)) {
        const double px = xs.to_pixel(t);
        svg += "<line x1=\"" + detail::svg_num(px) + "\" y1=\"" + detail::svg_num(mt) +
               "\" x2=\"" + detail::svg_num(px) + "\" y2=\"" + detail::svg_num(height - mb) +
               "\" stroke=\"#e0e0e0\"/>\n";
        svg += "<text x=\"" + detail::svg_num(px) + "\" y=\"" + detail::svg_num(height - mb + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               detail::tick_label(t) + "</text>\n";
    }
    for (double t : detail::log_ticks(min_y, max_y)) {
        const double py = ys.to_pixel(t);
        svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(py) +
               "\" x2=\"" + detail::svg_num(width - mr) + "\" y2=\"" + detail::svg_num(py) +
               "\" stroke=\"#e0e0e0\"/>\n";
        svg += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" + detail::svg_num(py + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               detail::tick_label(t) + "</text>\n";
    }

    // Isoperimetric boundary: fim = 1/sep, a straight line in log-log space.
    {
        const double y_at_min_x = -min_x, y_at_max_x = -max_x;
        svg += "<line x1=\"" + detail::svg_num(xs.to_pixel(min_x)) + "\" y1=\"" +
               detail::svg_num(ys.to_pixel(y_at_min_x)) + "\" x2=\"" +
               detail::svg_num(xs.to_pixel(max_x)) + "\" y2=\"" +
               detail::svg_num(ys.to_pixel(y_at_max_x)) +
               "\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n";
    }

    svg += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) + "\" width=\"" +
           detail::svg_num(width - ml - mr) + "\" height=\"" + detail::svg_num(height - mt - mb) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";

    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const double px = xs.to_pixel(std::log10(p.sep));
        const double py = ys.to_pixel(std::log10(p.fim));
        const char* color = detail::cluster_color(labels.empty() ? 0 : labels[i]);
        svg += "<circle cx=\"" + detail::svg_num(px) + "\" cy=\"" + detail::svg_num(py) +
               "\" r=\"5\" fill=\"" + color + "\" fill-opacity=\"0.85\"/>\n";
        svg += "<text x=\"" + detail::svg_num(px + 8) + "\" y=\"" + detail::svg_num(py - 6) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::xml_escape(p.id) +
               "</text>\n";
    }

    for (std::size_t c = 0; c < k; ++c) {
        const double lx = width - mr + 18, ly = mt + 14 + 20 * static_cast<double>(c);
        svg += "<circle cx=\"" + detail::svg_num(lx) + "\" cy=\"" + detail::svg_num(ly) +
               "\" r=\"5\" fill=\"" + std::string(detail::cluster_color(c)) + "\"/>\n";
        svg += "<text x=\"" + detail::svg_num(lx + 10) + "\" y=\"" + detail::svg_num(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">cluster " + std::to_string(c + 1) +
               "</text>\n";
    }

    svg += "<text x=\"" + detail::svg_num((ml + width - mr) / 2) + "\" y=\"" +
           detail::svg_num(height - 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
           "Shannon entropy power (log scale)</text>\n";
    svg += "<text x=\"24\" y=\"" + detail::svg_num((mt + height - mb) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 24 " + detail::svg_num((mt + height - mb) / 2) +
           ")\">Fisher information (log scale)</text>\n";
    svg += "</svg>\n";
    return svg;
}

/// Average silhouette width against the number of clusters; the selected k
/// is ringed.
inline std::string silhouette_curve_svg(
    std::span<const std::pair<std::size_t, double>> curve, std::size_t chosen_k,
    std::string_view title) {
    const double width = 640, height = 440;
    const double ml = 80, mr = 40, mt = 50, mb = 64;

    double min_s = 0.0, max_s = 0.0;
    for (const auto& [k, s] : curve) {
        min_s = std::min(min_s, s);
        max_s = std::max(max_s, s);
    }
    max_s = std::max(max_s + 0.05, 0.1);
    if (min_s < 0.0) min_s -= 0.05;
    double k_lo = curve.empty() ? 2.0 : static_cast<double>(curve.front().first);
    double k_hi = curve.empty() ? 3.0 : static_cast<double>(curve.back().first);
    if (k_hi - k_lo < 1.0) { k_lo -= 0.5; k_hi += 0.5; }

    detail::axis_scale xs{k_lo - 0.4, k_hi + 0.4, ml, width - mr};
    detail::axis_scale ys{min_s, max_s, height - mb, mt};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(width) +
           "\" height=\"" + detail::svg_num(height) + "\" viewBox=\"0 0 " +
           detail::svg_num(width) + " " + detail::svg_num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + detail::svg_num(width / 2) +
           "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"17\">" +
           detail::xml_escape(title) + "</text>\n";

    for (const auto& [k, s] : curve) {
        (void)s;
        const double px = xs.to_pixel(static_cast<double>(k));
        svg += "<text x=\"" + detail::svg_num(px) + "\" y=\"" + detail::svg_num(height - mb + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               std::to_string(k) + "</text>\n";
    }
    const int bands = 5;
    for (int i = 0; i <= bands; ++i) {
        const double s = min_s + (max_s - min_s) * i / bands;
        const double py = ys.to_pixel(s);
        svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(py) +
               "\" x2=\"" + detail::svg_num(width - mr) + "\" y2=\"" + detail::svg_num(py) +
               "\" stroke=\"#e0e0e0\"/>\n";
        svg += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" + detail::svg_num(py + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               double_to_string_fixed(s, 2) + "</text>\n";
    }

    svg += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) + "\" width=\"" +
           detail::svg_num(width - ml - mr) + "\" height=\"" + detail::svg_num(height - mt - mb) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";

    if (!curve.empty()) {
        std::string path = "M";
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const double px = xs.to_pixel(static_cast<double>(curve[i].first));
            const double py = ys.to_pixel(curve[i].second);
            if (i > 0) path += " L";
            path += detail::svg_num(px) + " " + detail::svg_num(py);
        }
        svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#0072B2\" stroke-width=\"2\"/>\n";
        for (const auto& [k, s] : curve) {
            const double px = xs.to_pixel(static_cast<double>(k));
            const double py = ys.to_pixel(s);
            if (k == chosen_k)
                svg += "<circle cx=\"" + detail::svg_num(px) + "\" cy=\"" + detail::svg_num(py) +
                       "\" r=\"9\" fill=\"none\" stroke=\"#D55E00\" stroke-width=\"2\"/>\n";
            svg += "<circle cx=\"" + detail::svg_num(px) + "\" cy=\"" + detail::svg_num(py) +
                   "\" r=\"4\" fill=\"#0072B2\"/>\n";
        }
    }

    svg += "<text x=\"" + detail::svg_num((ml + width - mr) / 2) + "\" y=\"" +
           detail::svg_num(height - 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
           "number of clusters k</text>\n";
    svg += "<text x=\"24\" y=\"" + detail::svg_num((mt + height - mb) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 24 " + detail::svg_num((mt + height - mb) / 2) +
           ")\">average silhouette width</text>\n";
    svg += "</svg>\n";
    return svg;
}

} // namespace fsts
