#pragma once

// Polar plots of radial functions as standalone SVG.

#include "../sweep.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gspine::lab {

using LabelledCurve = std::pair<std::string, RadialFunction>;

namespace detail {

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace detail

inline std::string radial_svg(const std::vector<LabelledCurve>& curves, int size = 480)
{
    if (curves.empty()) throw std::invalid_argument("render_radial_svg: no curves");
    const int grid = curves.front().second.grid_size();
    double reach = 0.0;
    for (const auto& [label, rho] : curves) {
        if (rho.grid_size() != grid) throw std::invalid_argument("render_radial_svg: curves have different grid sizes");
        reach = std::max(reach, rho.max());
    }
    if (!(reach > 0.0)) reach = 1.0;

    static constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                        "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    const double half = size / 2.0;
    const double scale = 0.42 * size / reach;
    const double legend_h = 18.0 * static_cast<double>(curves.size()) + 8.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
        << detail::fmt(size + legend_h) << "\" viewBox=\"0 0 " << size << ' ' << detail::fmt(size + legend_h)
        << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // Axes and reference rings.
    svg << "<g stroke=\"#cccccc\" stroke-width=\"1\" fill=\"none\">\n";
    svg << "<line x1=\"0\" y1=\"" << half << "\" x2=\"" << size << "\" y2=\"" << half << "\"/>\n";
    svg << "<line x1=\"" << half << "\" y1=\"0\" x2=\"" << half << "\" y2=\"" << size << "\"/>\n";
    for (int ring = 1; ring <= 4; ++ring)
        svg << "<circle cx=\"" << half << "\" cy=\"" << half << "\" r=\"" << detail::fmt(scale * reach * ring / 4.0)
            << "\" stroke-dasharray=\"3 3\"/>\n";
    svg << "</g>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const RadialFunction& rho = curves[c].second;
        svg << "<path fill=\"none\" stroke=\"" << palette[c % palette.size()] << "\" stroke-width=\"1.5\" d=\"";
        for (std::size_t j = 0; j < rho.values().size(); ++j) {
            const double t = rho.theta(j);
            const double x = half + scale * rho[j] * std::cos(t);
            const double y = half - scale * rho[j] * std::sin(t);
            svg << (j == 0 ? 'M' : 'L') << detail::fmt(x) << ',' << detail::fmt(y) << ' ';
        }
        svg << "Z\"/>\n";
    }

    svg << "<circle cx=\"" << half << "\" cy=\"" << half << "\" r=\"3\" fill=\"black\"/>\n";
    svg << "<text x=\"" << half + 6 << "\" y=\"" << half + 16
        << "\" font-family=\"sans-serif\" font-size=\"13\">p&#8320;</text>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const double y = size + 14.0 + 18.0 * static_cast<double>(c);
        svg << "<line x1=\"12\" y1=\"" << detail::fmt(y - 4) << "\" x2=\"36\" y2=\"" << detail::fmt(y - 4)
            << "\" stroke=\"" << palette[c % palette.size()] << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"42\" y=\"" << detail::fmt(y) << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << detail::xml_escape(curves[c].first) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void render_radial_svg(const std::vector<LabelledCurve>& curves, const std::filesystem::path& out)
{
    const std::string text = radial_svg(curves);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    std::ofstream f(out, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("render_radial_svg: cannot write " + out.string());
}

} // namespace gspine::lab
