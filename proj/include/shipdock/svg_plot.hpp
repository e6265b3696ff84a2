#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "shipdock/csv_io.hpp"
#include "shipdock/scenario.hpp"

namespace shipdock {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool equal_aspect = false;  // one data unit is the same length on both axes
};

// Panels are stacked vertically and share the figure width.
struct Figure {
  std::string title;
  std::vector<Panel> panels;
  double width = 760.0;
  double panel_height = 240.0;
};

// Round tick values covering [lo, hi] with roughly `target` intervals (steps of 1, 2 or 5
// times a power of ten). A degenerate range is widened first.
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

std::string render_svg(const Figure& figure);

// Region, safety outline at the dock pose and along the path, and the traveled path.
// East is drawn to the right and north up.
Figure path_figure(const Scenario& scenario, const std::vector<TrajectoryRow>& rows);
// North, east and heading error relative to the dock pose.
Figure pose_error_figure(const Scenario& scenario, const std::vector<TrajectoryRow>& rows);
// One panel per thruster with dashed force limits.
Figure force_figure(const Scenario& scenario, const std::vector<TrajectoryRow>& rows);
// One panel per azimuth with dashed sector limits, in degrees.
Figure azimuth_figure(const Scenario& scenario, const std::vector<TrajectoryRow>& rows);

// Writes path.svg, pose_error.svg, forces.svg and azimuths.svg into `dir` and returns the
// paths written.
std::vector<std::filesystem::path> write_plots(const std::filesystem::path& dir, const Scenario& scenario,
                                               const std::vector<TrajectoryRow>& rows);

}  // namespace shipdock
