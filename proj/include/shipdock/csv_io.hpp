#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "shipdock/mpc.hpp"
#include "shipdock/ocp.hpp"

namespace shipdock {

// One row of a trajectory CSV. `alpha` holds the azimuth angles only (fixed thrusters have no
// column); psi is wrapped.
struct TrajectoryRow {
  double t = 0.0;
  Vector6d state = Vector6d::Zero();  // x, y, psi, u, v, r
  std::vector<double> f;
  std::vector<double> alpha;
  double min_spatial_residual = 0.0;  // meters; inf without a region
};

// t, x, y, psi, u, v, r, f1..fn, alpha1..alpha_k, min_spatial_residual
std::vector<std::string> trajectory_header(int num_thrusters, int num_azimuths);

// %.17g, which round-trips every finite double; "inf", "-inf" and "nan" otherwise.
std::string format_double(double value);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows, int num_thrusters,
                          int num_azimuths);

// Reads a file produced by write_trajectory_csv; the thruster counts come from the header.
// Throws ValidationError("line N", ...) on malformed input.
std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in);

// Plant samples of a closed-loop run.
std::vector<TrajectoryRow> trajectory_rows(const ClosedLoopLog& log, const Scenario& scenario);

// Boundary and collocation nodes of an open-loop solution, in time order.
std::vector<TrajectoryRow> trajectory_rows(const DockingNlp& nlp, const Eigen::VectorXd& x);

// t, status, warm, degraded, iterations, qp_iterations, elastic_steps, kkt_residual,
// wall_time_s, then the applied command.
void write_replan_csv(std::ostream& out, const std::vector<ReplanRecord>& replans,
                      const std::vector<ThrusterSpec>& thrusters);

}  // namespace shipdock
