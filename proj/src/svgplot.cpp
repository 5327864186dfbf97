#include "sentinet/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "sentinet/errors.hpp"

namespace sentinet {

namespace {

std::string fmt(double v) {
  char buf[32];
  snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

void write_svg_chart(const std::filesystem::path& path,
                     const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  const double ml = 70, mr = 160, mt = 42, mb = 52;  // margins (legend on the right)
  const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      if (!opt.log_y || y > 0) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (!(xmin < xmax)) {
    xmin -= 1;
    xmax += 1;
  }
  if (!(ymin < ymax)) {
    ymin = opt.log_y ? ymin / 10 : ymin - 1;
    ymax = opt.log_y ? ymax * 10 : ymax + 1;
  }
  if (opt.log_y) {
    ymin = std::log10(std::max(ymin, 1e-300));
    ymax = std::log10(std::max(ymax, 1e-299));
    if (!(ymin < ymax)) ymax = ymin + 1;
  }

  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) {
    if (opt.log_y) y = std::log10(std::max(y, std::pow(10.0, ymin)));
    return mt + ph - (y - ymin) / (ymax - ymin) * ph;
  };

  std::ofstream out(path);
  if (!out) throw RunError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
      << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << " "
      << opt.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << opt.title << "</text>\n";

  // frame + ticks
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
      << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    double fx = xmin + (xmax - xmin) * i / ticks;
    double px = sx(fx);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\"" << fmt(px)
        << "\" y2=\"" << fmt(mt + ph + 5) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(mt + ph + 20)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << fmt_tick(fx) << "</text>\n";

    double fy = ymin + (ymax - ymin) * i / ticks;
    double py = mt + ph - (fy - ymin) / (ymax - ymin) * ph;
    double label = opt.log_y ? std::pow(10.0, fy) : fy;
    out << "<line x1=\"" << fmt(ml - 5) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(ml)
        << "\" y2=\"" << fmt(py) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(py + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << fmt_tick(label) << "</text>\n";
  }
  out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(mt + ph + 40)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
      << opt.x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << fmt(mt + ph / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 "
      << fmt(mt + ph / 2) << ")\">" << opt.y_label << "</text>\n";

  // series + legend
  double ly = mt + 10;
  for (const auto& s : series) {
    if (s.points.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : s.points) out << fmt(sx(x)) << "," << fmt(sy(y)) << " ";
    out << "\"/>\n";
    out << "<line x1=\"" << fmt(ml + pw + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(ml + pw + 34) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(ml + pw + 40) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";
}

}  // namespace sentinet
