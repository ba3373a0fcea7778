#pragma once

// Self-contained SVG rendering of persistence diagrams: birth on x, death on
// y, the diagonal as reference, essential classes on a dashed band above the
// finite range.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include "argutopo/io.hpp"
#include "argutopo/tda.hpp"

namespace argutopo {

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_diagram_svg(const PersistenceDiagram& diagram, const std::string& title = {}) {
  constexpr double kSize = 400.0;
  constexpr double kMargin = 50.0;
  constexpr double kPlot = kSize - 2 * kMargin;
  constexpr double kBand = 20.0;  // height of the infinity band above the plot

  double hi = 0.0;
  for (const auto& p : diagram.points) {
    hi = std::max(hi, p.birth);
    if (!p.essential()) hi = std::max(hi, p.death);
  }
  if (!(hi > 0.0)) hi = 1.0;
  hi *= 1.05;

  const auto sx = [&](double v) { return kMargin + v / hi * kPlot; };
  const auto sy = [&](double v) { return kMargin + kBand + (1.0 - v / hi) * kPlot; };
  const double inf_y = kMargin + kBand / 2;
  const double height = kSize + kBand;

  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
  using detail::svg_num;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(kSize) << "\" height=\""
      << svg_num(height) << "\" viewBox=\"0 0 " << svg_num(kSize) << ' ' << svg_num(height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << svg_num(kSize / 2) << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">"
        << detail::xml_escape(title) << "</text>\n";
  }
  // Axes.
  svg << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << svg_num(sx(0)) << "\" y1=\"" << svg_num(sy(0)) << "\" x2=\"" << svg_num(sx(hi))
      << "\" y2=\"" << svg_num(sy(0)) << "\"/>\n"
      << "<line x1=\"" << svg_num(sx(0)) << "\" y1=\"" << svg_num(sy(0)) << "\" x2=\"" << svg_num(sx(0))
      << "\" y2=\"" << svg_num(inf_y - kBand / 2) << "\"/>\n"
      << "</g>\n";
  svg << "<text x=\"" << svg_num(kSize / 2) << "\" y=\"" << svg_num(height - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">birth</text>\n";
  svg << "<text x=\"14\" y=\"" << svg_num(height / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 14 "
      << svg_num(height / 2) << ")\">death</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = hi * t / 4.0;
    svg << "<text x=\"" << svg_num(sx(v)) << "\" y=\"" << svg_num(sy(0) + 15)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << svg_num(v) << "</text>\n";
    svg << "<text x=\"" << svg_num(sx(0) - 5) << "\" y=\"" << svg_num(sy(v) + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << svg_num(v) << "</text>\n";
  }
  svg << "<line id=\"diagonal\" x1=\"" << svg_num(sx(0)) << "\" y1=\"" << svg_num(sy(0)) << "\" x2=\""
      << svg_num(sx(hi)) << "\" y2=\"" << svg_num(sy(hi)) << "\" stroke=\"gray\" stroke-width=\"1\"/>\n";
  svg << "<line id=\"infinity-band\" x1=\"" << svg_num(sx(0)) << "\" y1=\"" << svg_num(inf_y) << "\" x2=\""
      << svg_num(sx(hi)) << "\" y2=\"" << svg_num(inf_y)
      << "\" stroke=\"gray\" stroke-dasharray=\"4 3\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << svg_num(sx(0) - 5) << "\" y=\"" << svg_num(inf_y + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">&#8734;</text>\n";

  for (const auto& p : diagram.points) {
    const double x = sx(p.birth);
    const double y = p.essential() ? inf_y : sy(p.death);
    const char* color = kColors[std::clamp(p.dim, 0, 2)];
    const std::string cls = "H" + std::to_string(p.dim) + (p.essential() ? " essential" : "");
    switch (p.dim) {
      case 0:
        svg << "<circle class=\"" << cls << "\" cx=\"" << svg_num(x) << "\" cy=\"" << svg_num(y)
            << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        break;
      case 1:
        svg << "<polygon class=\"" << cls << "\" points=\"" << svg_num(x) << ',' << svg_num(y - 5) << ' '
            << svg_num(x - 4.5) << ',' << svg_num(y + 4) << ' ' << svg_num(x + 4.5) << ',' << svg_num(y + 4)
            << "\" fill=\"" << color << "\"/>\n";
        break;
      default:
        svg << "<rect class=\"" << cls << "\" x=\"" << svg_num(x - 4) << "\" y=\"" << svg_num(y - 4)
            << "\" width=\"8\" height=\"8\" fill=\"" << color << "\"/>\n";
    }
  }
  // Legend.
  for (int dim = 0; dim <= diagram.max_dim; ++dim) {
    const double ly = kMargin + kBand + 12.0 * dim + 10;
    svg << "<text x=\"" << svg_num(kSize - kMargin) << "\" y=\"" << svg_num(ly) << "\" text-anchor=\"end\" "
           "font-family=\"sans-serif\" font-size=\"11\" fill=\""
        << kColors[std::clamp(dim, 0, 2)] << "\">H" << dim << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline void emit_plot(const PersistenceDiagram& diagram, const std::filesystem::path& path,
                      const std::string& title = {}) {
  write_file_atomic(path, render_diagram_svg(diagram, title));
}

}  // namespace argutopo
