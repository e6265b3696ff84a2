#include "shipdock/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 46.0;
constexpr double kTitleHeight = 30.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

std::string tick_label(double v, double step) {
  if (std::abs(v) < 1e-9 * step) v = 0.0;
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
};

// Maps data coordinates into the plot rectangle of one panel.
struct Frame {
  double left, top, width, height;
  double x0, x1, y0, y1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

void widen(double& lo, double& hi) {
  if (hi - lo > 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi))) return;
  const double pad = std::max(1.0, std::abs(lo) * 0.1);
  lo -= pad;
  hi += pad;
}

void render_panel(std::ostringstream& svg, const Panel& panel, double top, double width, double height) {
  Range xr, yr;
  for (const auto& s : panel.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  if (xr.empty()) xr = {0.0, 1.0};
  if (yr.empty()) yr = {0.0, 1.0};
  widen(xr.lo, xr.hi);
  widen(yr.lo, yr.hi);

  Frame f{kMarginLeft, top + kMarginTop, width - kMarginLeft - kMarginRight,
          height - kMarginTop - kMarginBottom, 0, 1, 0, 1};
  std::vector<double> xt = nice_ticks(xr.lo, xr.hi);
  std::vector<double> yt = nice_ticks(yr.lo, yr.hi);
  f.x0 = xt.front();
  f.x1 = xt.back();
  f.y0 = yt.front();
  f.y1 = yt.back();
  if (panel.equal_aspect) {
    const double scale = std::min(f.width / (f.x1 - f.x0), f.height / (f.y1 - f.y0));
    const double cx = 0.5 * (f.x0 + f.x1);
    const double cy = 0.5 * (f.y0 + f.y1);
    f.x0 = cx - 0.5 * f.width / scale;
    f.x1 = cx + 0.5 * f.width / scale;
    f.y0 = cy - 0.5 * f.height / scale;
    f.y1 = cy + 0.5 * f.height / scale;
    const double step = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
    xt = nice_ticks(f.x0, f.x1, static_cast<int>(std::round((f.x1 - f.x0) / step)));
    yt = nice_ticks(f.y0, f.y1, static_cast<int>(std::round((f.y1 - f.y0) / step)));
    std::erase_if(xt, [&](double v) { return v < f.x0 - 1e-9 || v > f.x1 + 1e-9; });
    std::erase_if(yt, [&](double v) { return v < f.y0 - 1e-9 || v > f.y1 + 1e-9; });
  }

  const double xstep = xt.size() > 1 ? xt[1] - xt[0] : 1.0;
  const double ystep = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<text x=\"" << num(f.left + f.width / 2) << "\" y=\"" << num(top + 20)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.title) << "</text>\n";
  for (double v : xt) {
    const double x = f.px(v);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.top) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(f.top + f.height) << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(f.top + f.height + 15)
        << "\" text-anchor=\"middle\">" << tick_label(v, xstep) << "</text>\n";
  }
  for (double v : yt) {
    const double y = f.py(v);
    svg << "<line x1=\"" << num(f.left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(f.left + f.width)
        << "\" y2=\"" << num(y) << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << tick_label(v, ystep) << "</text>\n";
  }
  svg << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.width)
      << "\" height=\"" << num(f.height) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  svg << "<text x=\"" << num(f.left + f.width / 2) << "\" y=\"" << num(f.top + f.height + 34)
      << "\" text-anchor=\"middle\">" << escape(panel.x_label) << "</text>\n";
  svg << "<text transform=\"translate(" << num(16) << "," << num(f.top + f.height / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";
  svg << "</g>\n";

  // Clip series to the plot rectangle; limit lines and outlines may extend past it.
  const std::string clip = "clip" + std::to_string(static_cast<int>(top));
  svg << "<clipPath id=\"" << clip << "\"><rect x=\"" << num(f.left) << "\" y=\"" << num(f.top)
      << "\" width=\"" << num(f.width) << "\" height=\"" << num(f.height) << "\"/></clipPath>\n";
  svg << "<g clip-path=\"url(#" << clip << ")\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (const auto& s : panel.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    std::string points;
    auto flush = [&] {
      if (points.empty()) return;
      svg << "<polyline points=\"" << points << "\" stroke=\"" << s.color << "\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(f.px(s.x[i])) + "," + num(f.py(s.y[i]));
    }
    flush();
  }
  svg << "</g>\n";

  double ly = f.top + 14;
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& s : panel.series) {
    if (s.label.empty()) continue;
    const double lx = f.left + f.width - 150;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 24) << "\" y2=\""
        << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    svg << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
    ly += 15;
  }
  svg << "</g>\n";
}

std::vector<double> column(const std::vector<TrajectoryRow>& rows, auto get) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(get(row));
  return out;
}

Series constant(double value, const std::vector<double>& t, const std::string& label, const std::string& color) {
  Series s;
  if (!t.empty()) {
    s.x = {t.front(), t.back()};
    s.y = {value, value};
  }
  s.label = label;
  s.color = color;
  s.dashed = true;
  return s;
}

// Safety outline (closed) at a pose, in plot coordinates (east, north).
Series outline(const ConvexPolygon& body, double x, double y, double psi, const std::string& color) {
  Series s;
  s.color = color;
  const double c = std::cos(psi), sn = std::sin(psi);
  const auto& v = body.vertices();
  for (std::size_t i = 0; i <= v.size(); ++i) {
    const Point2& p = v[i % v.size()];
    s.x.push_back(y + sn * p.x() + c * p.y());
    s.y.push_back(x + c * p.x() - sn * p.y());
  }
  return s;
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw PreconditionError("nice_ticks: non-finite range");
  if (lo > hi) std::swap(lo, hi);
  widen(lo, hi);
  target = std::max(target, 1);
  const double raw = (hi - lo) / target;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  double step = magnitude;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * magnitude;
    if (step >= raw * (1.0 - 1e-9)) break;
  }
  const double first = std::floor(lo / step + 1e-9) * step;
  const double last = std::ceil(hi / step - 1e-9) * step;
  std::vector<double> ticks;
  const int count = static_cast<int>(std::round((last - first) / step));
  for (int i = 0; i <= count; ++i) ticks.push_back(first + i * step);
  return ticks;
}

std::string render_svg(const Figure& figure) {
  const double height = kTitleHeight + figure.panel_height * std::max<std::size_t>(figure.panels.size(), 1);
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(figure.width) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(figure.width) << ' ' << num(height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(figure.width / 2) << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\">" << escape(figure.title)
      << "</text>\n";
  double top = kTitleHeight;
  for (const auto& panel : figure.panels) {
    render_panel(svg, panel, top, figure.width, figure.panel_height);
    top += figure.panel_height;
  }
  svg << "</svg>\n";
  return svg.str();
}

Figure path_figure(const Scenario& scenario, const std::vector<TrajectoryRow>& rows) {
  Figure figure;
  figure.title = scenario.name + ": path";
  figure.panel_height = 620.0;
  Panel panel;
  panel.title = "Path in the operating region";
  panel.x_label = "east [m]";
  panel.y_label = "north [m]";
  panel.equal_aspect = true;

  if (scenario.region) {
    Series region;
    region.label = "operating region";
    region.color = "#555555";
    const auto& v = scenario.region->vertices();
    for (std::size_t i = 0; i <= v.size(); ++i) {
      region.x.push_back(v[i % v.size()].y());
      region.y.push_back(v[i % v.size()].x());
    }
    panel.series.push_back(std::move(region));
  }

  const ConvexPolygon body = scenario.safety_polygon();
  Series dock = outline(body, scenario.desired.x(), scenario.desired.y(), scenario.desired.psi(), "#2ca02c");
  dock.label = "dock pose";
  dock.dashed = true;
  panel.series.push_back(std::move(dock));

  if (!rows.empty()) {
    // About a dozen outlines along the path, evenly spaced in time.
    const double t0 = rows.front().t;
    const double span = std::max(rows.back().t - t0, 1e-9);
    double next = t0;
    bool first = true;
    for (const auto& row : rows) {
      if (row.t + 1e-9 < next) continue;
      Series s = outline(body, row.state[0], row.state[1], row.state[2], "#9ab8d6");
      if (first) s.label = "safety outline";
      first = false;
      panel.series.push_back(std::move(s));
      next += span / 12.0;
    }
    Series path;
    path.label = "path";
    path.color = "#d62728";
    path.x = column(rows, [](const TrajectoryRow& r) { return r.state[1]; });
    path.y = column(rows, [](const TrajectoryRow& r) { return r.state[0]; });
    panel.series.push_back(std::move(path));
  }
  figure.panels.push_back(std::move(panel));
  return figure;
}

Figure pose_error_figure(const Scenario& scenario, const std::vector<TrajectoryRow>& rows) {
  Figure figure;
  figure.title = scenario.name + ": pose error";
  const auto t = column(rows, [](const TrajectoryRow& r) { return r.t; });
  const Pose& d = scenario.desired;

  Panel position;
  position.title = "Position error";
  position.x_label = "t [s]";
  position.y_label = "[m]";
  Series north{t, column(rows, [&](const TrajectoryRow& r) { return r.state[0] - d.x(); }), "north", kPalette[0]};
  Series east{t, column(rows, [&](const TrajectoryRow& r) { return r.state[1] - d.y(); }), "east", kPalette[1]};
  position.series = {north, east};

  Panel heading;
  heading.title = "Heading error";
  heading.x_label = "t [s]";
  heading.y_label = "[deg]";
  heading.series = {Series{t, column(rows, [&](const TrajectoryRow& r) {
                              return wrap_angle(r.state[2] - d.psi()) * kRadToDeg;
                            }),
                           "heading", kPalette[2]}};
  figure.panels = {position, heading};
  return figure;
}

Figure force_figure(const Scenario& scenario, const std::vector<TrajectoryRow>& rows) {
  Figure figure;
  figure.title = scenario.name + ": thruster forces";
  figure.panel_height = 200.0;
  const auto t = column(rows, [](const TrajectoryRow& r) { return r.t; });
  for (std::size_t i = 0; i < scenario.thrusters.size(); ++i) {
    const ThrusterSpec& spec = scenario.thrusters[i];
    Panel panel;
    panel.title = "Thruster " + std::to_string(i + 1) + (spec.is_azimuth() ? " (azimuth)" : " (fixed)");
    panel.x_label = "t [s]";
    panel.y_label = "force [kN]";
    Series f{t, column(rows, [&](const TrajectoryRow& r) { return i < r.f.size() ? r.f[i] / 1e3 : NAN; }),
             "f" + std::to_string(i + 1), kPalette[0]};
    panel.series = {f, constant(spec.f_max / 1e3, t, "limits", "#888888"), constant(spec.f_min / 1e3, t, "", "#888888")};
    figure.panels.push_back(std::move(panel));
  }
  return figure;
}

Figure azimuth_figure(const Scenario& scenario, const std::vector<TrajectoryRow>& rows) {
  Figure figure;
  figure.title = scenario.name + ": azimuth angles";
  figure.panel_height = 200.0;
  const auto t = column(rows, [](const TrajectoryRow& r) { return r.t; });
  std::size_t a = 0;
  for (std::size_t i = 0; i < scenario.thrusters.size(); ++i) {
    const ThrusterSpec& spec = scenario.thrusters[i];
    if (!spec.is_azimuth()) continue;
    Panel panel;
    panel.title = "Thruster " + std::to_string(i + 1);
    panel.x_label = "t [s]";
    panel.y_label = "angle [deg]";
    Series alpha{t,
                 column(rows, [&](const TrajectoryRow& r) { return a < r.alpha.size() ? r.alpha[a] * kRadToDeg : NAN; }),
                 "alpha" + std::to_string(a + 1), kPalette[3]};
    panel.series = {alpha, constant(spec.alpha_max * kRadToDeg, t, "limits", "#888888"),
                    constant(spec.alpha_min * kRadToDeg, t, "", "#888888")};
    figure.panels.push_back(std::move(panel));
    ++a;
  }
  return figure;
}

std::vector<std::filesystem::path> write_plots(const std::filesystem::path& dir, const Scenario& scenario,
                                               const std::vector<TrajectoryRow>& rows) {
  std::filesystem::create_directories(dir);
  const std::pair<const char*, Figure> figures[] = {
      {"path.svg", path_figure(scenario, rows)},
      {"pose_error.svg", pose_error_figure(scenario, rows)},
      {"forces.svg", force_figure(scenario, rows)},
      {"azimuths.svg", azimuth_figure(scenario, rows)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [name, figure] : figures) {
    const auto path = dir / name;
    std::ofstream out(path);
    out << render_svg(figure);
    if (!out) throw Error("cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace shipdock
