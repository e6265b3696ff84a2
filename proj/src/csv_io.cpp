#include "shipdock/csv_io.hpp"

#include <charconv>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, int line_number) {
  std::string trimmed = text;
  while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) trimmed.pop_back();
  if (trimmed == "inf") return std::numeric_limits<double>::infinity();
  if (trimmed == "-inf") return -std::numeric_limits<double>::infinity();
  if (trimmed == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* begin = trimmed.data();
  const char* end = begin + trimmed.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || trimmed.empty()) {
    throw ValidationError("line " + std::to_string(line_number), "not a number: '" + text + "'");
  }
  return value;
}

TrajectoryRow make_row(double t, const Vector6d& state, const ThrusterCommand& command,
                       const std::vector<ThrusterSpec>& thrusters, double residual) {
  TrajectoryRow row;
  row.t = t;
  row.state = state;
  row.state[2] = wrap_angle(state[2]);
  row.f = command.f;
  for (std::size_t i = 0; i < thrusters.size(); ++i) {
    if (thrusters[i].is_azimuth()) row.alpha.push_back(command.alpha[i]);
  }
  row.min_spatial_residual = residual;
  return row;
}

double point_residual(const HalfspaceSet& halfspaces, const std::vector<Point2>& points,
                      const Vector6d& state) {
  if (halfspaces.size() == 0) return std::numeric_limits<double>::infinity();
  return containment_residuals(halfspaces, Pose(state[0], state[1], state[2]), points).minCoeff();
}

}  // namespace

std::vector<std::string> trajectory_header(int num_thrusters, int num_azimuths) {
  std::vector<std::string> header = {"t", "x", "y", "psi", "u", "v", "r"};
  for (int i = 1; i <= num_thrusters; ++i) header.push_back("f" + std::to_string(i));
  for (int i = 1; i <= num_azimuths; ++i) header.push_back("alpha" + std::to_string(i));
  header.emplace_back("min_spatial_residual");
  return header;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows, int num_thrusters,
                          int num_azimuths) {
  const auto header = trajectory_header(num_thrusters, num_azimuths);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (static_cast<int>(row.f.size()) != num_thrusters ||
        static_cast<int>(row.alpha.size()) != num_azimuths) {
      throw DimensionMismatch("trajectory row has the wrong number of thruster columns");
    }
    out << format_double(row.t);
    for (int i = 0; i < 6; ++i) out << ',' << format_double(row.state[i]);
    for (double f : row.f) out << ',' << format_double(f);
    for (double a : row.alpha) out << ',' << format_double(a);
    out << ',' << format_double(row.min_spatial_residual) << '\n';
  }
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("line 1", "empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  int num_thrusters = 0;
  int num_azimuths = 0;
  for (const auto& name : header) {
    if (name.size() > 1 && name[0] == 'f' && std::isdigit(static_cast<unsigned char>(name[1]))) ++num_thrusters;
    if (name.rfind("alpha", 0) == 0) ++num_azimuths;
  }
  if (header != trajectory_header(num_thrusters, num_azimuths)) {
    throw ValidationError("line 1", "unexpected trajectory header: " + line);
  }

  std::vector<TrajectoryRow> rows;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_number),
                            "expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()));
    }
    TrajectoryRow row;
    std::size_t c = 0;
    row.t = parse_double(fields[c++], line_number);
    for (int i = 0; i < 6; ++i) row.state[i] = parse_double(fields[c++], line_number);
    for (int i = 0; i < num_thrusters; ++i) row.f.push_back(parse_double(fields[c++], line_number));
    for (int i = 0; i < num_azimuths; ++i) row.alpha.push_back(parse_double(fields[c++], line_number));
    row.min_spatial_residual = parse_double(fields[c], line_number);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TrajectoryRow> trajectory_rows(const ClosedLoopLog& log, const Scenario& scenario) {
  std::vector<TrajectoryRow> rows;
  rows.reserve(log.samples.size());
  for (const auto& logged : log.samples) {
    const PlantSample& s = logged.sample;
    rows.push_back(make_row(s.t, s.state, ThrusterCommand{s.alpha, s.f}, scenario.thrusters,
                            logged.min_spatial_residual));
  }
  return rows;
}

std::vector<TrajectoryRow> trajectory_rows(const DockingNlp& nlp, const Eigen::VectorXd& x) {
  const Scenario& scenario = nlp.scenario();
  const CollocationGrid& grid = nlp.grid();
  const int N = scenario.horizon.intervals_N;
  const double h = grid.h;
  HalfspaceSet halfspaces;
  std::vector<Point2> points;
  if (scenario.region) {
    halfspaces = to_halfspaces(*scenario.region);
    points = scenario.safety_polygon().vertices();
  }

  std::vector<TrajectoryRow> rows;
  for (int k = 0; k < N; ++k) {
    const ThrusterCommand command = nlp.command(x, k);
    for (int j = 0; j <= grid.degree; ++j) {
      const double t = (k + grid.nodes[j]) * h;
      const Vector6d z = nlp.node_state(x, k, j);
      rows.push_back(make_row(t, z, command, scenario.thrusters, point_residual(halfspaces, points, z)));
    }
  }
  const Vector6d z = nlp.boundary_state(x, N);
  rows.push_back(make_row(N * h, z, nlp.command(x, N - 1), scenario.thrusters,
                          point_residual(halfspaces, points, z)));
  return rows;
}

void write_replan_csv(std::ostream& out, const std::vector<ReplanRecord>& replans,
                      const std::vector<ThrusterSpec>& thrusters) {
  const int num_thrusters = static_cast<int>(thrusters.size());
  int num_azimuths = 0;
  for (const auto& spec : thrusters) num_azimuths += spec.is_azimuth() ? 1 : 0;
  out << "t,status,warm,degraded,iterations,qp_iterations,elastic_steps,kkt_residual,wall_time_s";
  for (int i = 1; i <= num_thrusters; ++i) out << ",f" << i;
  for (int i = 1; i <= num_azimuths; ++i) out << ",alpha" << i;
  out << '\n';
  for (const auto& r : replans) {
    out << format_double(r.t) << ',' << to_string(r.status) << ',' << (r.warm ? 1 : 0) << ','
        << (r.degraded ? 1 : 0) << ',' << r.stats.iterations << ',' << r.stats.qp_iterations << ','
        << r.stats.elastic_steps << ',' << format_double(r.stats.kkt_residual) << ','
        << format_double(r.stats.wall_time_s);
    for (double f : r.command.f) out << ',' << format_double(f);
    for (std::size_t i = 0; i < thrusters.size(); ++i) {
      if (thrusters[i].is_azimuth()) out << ',' << format_double(r.command.alpha[i]);
    }
    out << '\n';
  }
}

}  // namespace shipdock
