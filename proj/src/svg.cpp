#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "curvesplit/errors.hpp"
#include "curvesplit/geometry.hpp"

namespace curvesplit {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<Polyline>& curves, const SvgOptions& options) {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (const auto& c : curves) {
    for (Vec2 v : c) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  }
  if (xmin > xmax) xmin = ymin = -1, xmax = ymax = 1;
  const double margin = 0.05 * options.size;
  const double extent = std::max({xmax - xmin, ymax - ymin, 1e-9});
  const double scale = (options.size - 2 * margin) / extent;
  auto px = [&](Vec2 v) {
    // SVG y grows downwards.
    return num(margin + (v.x - xmin) * scale) + "," + num(margin + (ymax - v.y) * scale);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(options.size)
      << "\" height=\"" << num(options.size) << "\" viewBox=\"0 0 " << num(options.size) << " "
      << num(options.size) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    out << "<polygon fill=\"none\" stroke=\"" << kPalette[i % std::size(kPalette)]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < curves[i].size(); ++k) {
      if (k) out << ' ';
      out << px(curves[i][k]);
    }
    out << "\"/>\n";
  }
  if (options.show_crossings) {
    try {
      for (const auto& x : frame_intersections(PolylineFrame{0.0, curves}, options.tol)) {
        const auto p = px(x.point);
        const auto comma = p.find(',');
        out << "<circle cx=\"" << p.substr(0, comma) << "\" cy=\"" << p.substr(comma + 1)
            << "\" r=\"3\" fill=\"black\"/>\n";
      }
    } catch (const GenericityError&) {
      // Non-generic pictures are still drawn, only without crossing markers.
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace curvesplit
