#include "ecsim/cli/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace ecsim::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kPanel = 300;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 30;
constexpr double kBottom = 50;

const char* colour(Protocol p) {
  switch (p) {
    case Protocol::nec: return "#1f77b4";
    case Protocol::cec: return "#d62728";
    case Protocol::catalyst_reuse: return "#ff7f0e";
    case Protocol::distillation: return "#2ca02c";
  }
  return "#000000";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string axis_label(Axis axis, AxisConvention convention) {
  const std::string name = to_string(axis);
  if (convention == AxisConvention::retention && axis != Axis::p_g) return "1 - " + name + " (retention)";
  return name;
}

struct Panel {
  double y0;  // top pixel
  double lo;
  double hi;
  std::string title;
};

void panel(std::ostringstream& out, const Panel& p, double xlo, double xhi, const std::string& xlabel,
           const std::map<Protocol, std::vector<std::pair<double, double>>>& series) {
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kPanel - kTop - kBottom;
  const double x0 = kLeft;
  const double y0 = p.y0 + kTop;
  auto px = [&](double x) { return x0 + (xhi > xlo ? (x - xlo) / (xhi - xlo) : 0.5) * plot_w; };
  auto py = [&](double y) { return y0 + plot_h - (p.hi > p.lo ? (y - p.lo) / (p.hi - p.lo) : 0.5) * plot_h; };

  out << "<text x=\"" << x0 << "\" y=\"" << y0 - 10 << "\" font-size=\"14\">" << p.title << "</text>\n";
  out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xlo + (xhi - xlo) * i / 4.0;
    const double fy = p.lo + (p.hi - p.lo) * i / 4.0;
    out << "<text x=\"" << px(fx) << "\" y=\"" << y0 + plot_h + 16
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << py(fy) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
        << fmt(fy) << "</text>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << py(fy) << "\" x2=\"" << x0 + plot_w << "\" y2=\"" << py(fy)
        << "\" stroke=\"#ddd\"/>\n";
  }
  out << "<text x=\"" << x0 + plot_w / 2 << "\" y=\"" << y0 + plot_h + 36
      << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";

  double ly = y0 + 10;
  for (const auto& [proto, pts] : series) {
    out << "<polyline fill=\"none\" stroke=\"" << colour(proto) << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      out << (i ? " " : "") << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
    out << "\"/>\n";
    for (const auto& [x, y] : pts)
      out << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"2.5\" fill=\"" << colour(proto)
          << "\"/>\n";
    out << "<line x1=\"" << x0 + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\"" << x0 + plot_w + 35 << "\" y2=\""
        << ly << "\" stroke=\"" << colour(proto) << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << x0 + plot_w + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << to_string(proto)
        << "</text>\n";
    ly += 18;
  }
}

}  // namespace

std::string render_svg(const std::vector<SweepRow>& rows, Axis axis, AxisConvention convention) {
  std::map<Protocol, std::vector<std::pair<double, double>>> infid;
  std::map<Protocol, std::vector<std::pair<double, double>>> succ;
  double xlo = 0.0, xhi = 1.0, ihi = 0.0;
  if (!rows.empty()) {
    xlo = xhi = rows.front().axis_value;
  }
  for (const auto& r : rows) {
    infid[r.protocol].emplace_back(r.axis_value, r.infidelity);
    succ[r.protocol].emplace_back(r.axis_value, r.success_probability);
    xlo = std::min(xlo, r.axis_value);
    xhi = std::max(xhi, r.axis_value);
    ihi = std::max(ihi, r.infidelity);
  }
  for (auto* s : {&infid, &succ})
    for (auto& [p, pts] : *s) std::sort(pts.begin(), pts.end());
  ihi = ihi > 0.0 ? ihi * 1.1 : 1.0;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << 2 * kPanel
      << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string xlabel = axis_label(axis, convention);
  panel(out, {0.0, 0.0, ihi, "Infidelity"}, xlo, xhi, xlabel, infid);
  panel(out, {kPanel, 0.0, 1.0, "Success probability"}, xlo, xhi, xlabel, succ);
  out << "</svg>\n";
  return out.str();
}

}  // namespace ecsim::cli
