#include "pcparam/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pcparam {
namespace {

constexpr double kW = 640, kH = 480, kMargin = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  void fit(double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  void pad() {
    if (x1 - x0 < 1e-12) x1 = x0 + 1;
    if (y1 - y0 < 1e-12) y1 = y0 + 1;
  }
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kW - 2 * kMargin); }
  double py(double y) const { return kH - kMargin - (y - y0) / (y1 - y0) * (kH - 2 * kMargin); }
};

Frame frame_from(const std::vector<double>& xs, const std::vector<double>& ys, bool equal_aspect) {
  Frame f;
  if (xs.empty()) return f;
  f.x0 = f.x1 = xs.front();
  f.y0 = f.y1 = ys.front();
  for (std::size_t i = 0; i < xs.size(); ++i) f.fit(xs[i], ys[i]);
  f.pad();
  if (equal_aspect) {
    const double sx = (f.x1 - f.x0) / (kW - 2 * kMargin), sy = (f.y1 - f.y0) / (kH - 2 * kMargin);
    const double s = std::max(sx, sy);
    const double cx = 0.5 * (f.x0 + f.x1), cy = 0.5 * (f.y0 + f.y1);
    f.x0 = cx - 0.5 * s * (kW - 2 * kMargin);
    f.x1 = cx + 0.5 * s * (kW - 2 * kMargin);
    f.y0 = cy - 0.5 * s * (kH - 2 * kMargin);
    f.y1 = cy + 0.5 * s * (kH - 2 * kMargin);
  }
  return f;
}

void open(std::ostringstream& out, const std::string& title, const std::string& extra = "") {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
      << kW << ' ' << kH << "\"" << extra << ">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << escape(title) << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f) {
  out << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin << "\" y2=\"" << kH - kMargin
      << "\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kH - kMargin
      << "\"/>\n</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kH - kMargin + 14 << "\">" << num(f.x0) << "</text>\n";
  out << "<text x=\"" << kW - kMargin << "\" y=\"" << kH - kMargin + 14 << "\" text-anchor=\"end\">" << num(f.x1)
      << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kH - kMargin << "\" text-anchor=\"end\">" << num(f.y0)
      << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4 << "\" text-anchor=\"end\">" << num(f.y1)
      << "</text>\n</g>\n";
}

}  // namespace

std::string svg_scatter(const Points& points, const std::vector<std::vector<int>>& loops, const std::string& title) {
  std::vector<double> xs, ys;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    xs.push_back(points(i, 0));
    ys.push_back(points.cols() > 1 ? points(i, 1) : 0.0);
  }
  const Frame f = frame_from(xs, ys, true);
  std::ostringstream out;
  open(out, title);
  axes(out, f);
  out << "<g fill=\"#1f4e9c\">\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << "<circle cx=\"" << num(f.px(xs[i])) << "\" cy=\"" << num(f.py(ys[i])) << "\" r=\"1.5\"/>\n";
  out << "</g>\n";
  for (const auto& loop : loops) {
    out << "<polygon fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < loop.size(); ++k)
      out << (k ? " " : "") << num(f.px(xs[loop[k]])) << ',' << num(f.py(ys[loop[k]]));
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_stage_lines(const TrainLog& log, const std::string& title) {
  struct Series {
    const char* name;
    const char* color;
    double StageRecord::*field;
  };
  const Series metrics[] = {{"hausdorff", "#1f4e9c", &StageRecord::hausdorff},
                            {"mean_abs_angle", "#c0392b", &StageRecord::mean_abs_angle},
                            {"landmark_hausdorff", "#27ae60", &StageRecord::landmark_hausdorff}};

  std::vector<double> xs, ys;
  for (const auto& r : log.stages)
    for (const auto& m : metrics)
      if (std::isfinite(r.*m.field)) {
        xs.push_back(r.stage);
        ys.push_back(r.*m.field);
      }
  Frame f = frame_from(xs, ys, false);
  if (!ys.empty()) f.y0 = std::min(0.0, f.y0);

  std::ostringstream out;
  open(out, title);
  axes(out, f);
  int legend = 0;
  for (const auto& m : metrics) {
    std::ostringstream pts;
    int count = 0;
    for (const auto& r : log.stages)
      if (std::isfinite(r.*m.field)) {
        pts << (count++ ? " " : "") << num(f.px(r.stage)) << ',' << num(f.py(r.*m.field));
      }
    if (count == 0) continue;
    out << "<polyline fill=\"none\" stroke=\"" << m.color << "\" stroke-width=\"2\" points=\"" << pts.str()
        << "\"/>\n";
    out << "<text x=\"" << kW - kMargin - 120 << "\" y=\"" << kMargin + 14 * legend++
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << m.color << "\">" << m.name << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_histogram(const Histogram& hist, const std::string& title) {
  const int bins = static_cast<int>(hist.counts.size());
  std::vector<double> xs, ys;
  if (bins > 0) {
    xs = {hist.edges.front(), hist.edges.back()};
    const long peak = *std::max_element(hist.counts.begin(), hist.counts.end());
    ys = {0.0, static_cast<double>(std::max(peak, 1L))};
  }
  const Frame f = frame_from(xs, ys, false);
  std::ostringstream out;
  open(out, title, " data-bins=\"" + std::to_string(bins) + "\"");
  axes(out, f);
  out << "<g fill=\"#1f4e9c\" stroke=\"white\" stroke-width=\"0.5\">\n";
  for (int b = 0; b < bins; ++b) {
    const double x0 = f.px(hist.edges[b]), x1 = f.px(hist.edges[b + 1]);
    const double y = f.py(static_cast<double>(hist.counts[b]));
    out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y) << "\" width=\"" << num(x1 - x0) << "\" height=\""
        << num(f.py(0.0) - y) << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace pcparam
