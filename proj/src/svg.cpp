#include "mmca/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mmca {

namespace {

constexpr double kSize = 640.0;
constexpr double kMargin = 60.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

}  // namespace

std::string biplot_svg(const Matrix& x, const Matrix& a,
                       const std::vector<std::string>& category_labels, const Vector& d,
                       int dim_x, int dim_y) {
  if (dim_x < 0 || dim_y < 0 || dim_x >= x.cols() || dim_y >= x.cols())
    throw ShapeError("biplot_svg: dimension out of range");
  if (a.cols() != x.cols()) throw ShapeError("biplot_svg: X/A rank mismatch");
  if (static_cast<int>(category_labels.size()) != a.rows())
    throw ShapeError("biplot_svg: label count does not match categories");

  double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
  auto widen = [&](double vx, double vy) {
    lo_x = std::min(lo_x, vx);
    hi_x = std::max(hi_x, vx);
    lo_y = std::min(lo_y, vy);
    hi_y = std::max(hi_y, vy);
  };
  for (int i = 0; i < x.rows(); ++i) widen(x(i, dim_x), x(i, dim_y));
  for (int i = 0; i < a.rows(); ++i) widen(a(i, dim_x), a(i, dim_y));
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  const double pad = 0.08 * span;
  lo_x -= pad; hi_x = lo_x + span + 2 * pad;
  lo_y -= pad; hi_y = lo_y + span + 2 * pad;

  const double inner = kSize - 2 * kMargin;
  auto px = [&](double v) { return kMargin + (v - lo_x) / (hi_x - lo_x) * inner; };
  auto py = [&](double v) { return kSize - kMargin - (v - lo_y) / (hi_y - lo_y) * inner; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kSize) << "\" height=\""
      << fmt(kSize) << "\" viewBox=\"0 0 " << fmt(kSize) << " " << fmt(kSize) << "\">\n";

  // axes through the origin
  svg << "<line x1=\"" << fmt(px(lo_x)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(px(hi_x))
      << "\" y2=\"" << fmt(py(0)) << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(lo_y)) << "\" x2=\"" << fmt(px(0))
      << "\" y2=\"" << fmt(py(hi_y)) << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";

  svg << "<text x=\"" << fmt(kSize / 2) << "\" y=\"" << fmt(kSize - 16)
      << "\" font-size=\"13\" text-anchor=\"middle\">dim " << (dim_x + 1)
      << " (d=" << fmt(d(dim_x)) << ")</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt(kSize / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << fmt(kSize / 2)
      << ")\">dim " << (dim_y + 1) << " (d=" << fmt(d(dim_y)) << ")</text>\n";

  for (int i = 0; i < x.rows(); ++i)
    svg << "<circle cx=\"" << fmt(px(x(i, dim_x))) << "\" cy=\"" << fmt(py(x(i, dim_y)))
        << "\" r=\"2.5\" fill=\"#4878a8\" fill-opacity=\"0.6\"/>\n";

  for (int i = 0; i < a.rows(); ++i) {
    const double cx = px(a(i, dim_x));
    const double cy = py(a(i, dim_y));
    svg << "<rect x=\"" << fmt(cx - 3) << "\" y=\"" << fmt(cy - 3)
        << "\" width=\"6\" height=\"6\" fill=\"#c0392b\"/>\n";
    svg << "<text x=\"" << fmt(cx + 5) << "\" y=\"" << fmt(cy - 4) << "\" font-size=\"11\">"
        << xml_escape(category_labels[static_cast<size_t>(i)]) << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mmca
