#pragma once

#include <optional>
#include <vector>

#include "shipdock/ocp.hpp"
#include "shipdock/plant.hpp"
#include "shipdock/scenario.hpp"
#include "shipdock/sqp_solver.hpp"

namespace shipdock {

struct DockingTolerance {
  double position = 1.0;                        // m
  double heading = 2.0 * 3.14159265358979323846 / 180.0;  // rad
  double speed = 0.05;                          // m/s, sqrt(u^2 + v^2)

  bool satisfied(const Vector6d& state, const Pose& desired) const;
};

struct MpcConfig {
  SolverSettings solver;
  TranscriptionOptions transcription;
  DockingTolerance tolerance;
  double plant_dt = 0.1;
  int success_replans = 3;   // consecutive docked replans that end the run
  bool stop_when_docked = true;
};

// Current vessel and actuator state seen by the planner.
struct VesselState {
  Vector6d state = Vector6d::Zero();
  ThrusterCommand command;  // last applied command; its angles are the actual azimuth angles
};

struct PlanResult {
  SolveResult solve;
  ThrusterCommand command;
  std::vector<TrajectoryPoint> predicted;
  bool degraded = false;  // solver failed and the previous command is held
};

// Solves the docking problem from `current`. On success the first-interval command is
// returned, projected onto the thrust bounds and the slew window around the current angles
// (this only removes solver-tolerance noise); on failure the previous command is held.
PlanResult plan(const VesselState& current, const Scenario& scenario, const MpcConfig& config,
                const std::optional<WarmStart>& warm = std::nullopt);

// Shifts every interval block one interval to the left. The freed last interval repeats the
// previous last controls, and its states are integrated from the previous final state under
// those controls. Multipliers move with their rows.
WarmStart shift_warm_start(const DockingNlp& nlp, const SolveResult& previous);

struct ReplanRecord {
  double t = 0.0;
  SolveStatus status = SolveStatus::kMaxIterations;
  SolveStats stats;
  bool degraded = false;
  bool warm = false;
  ThrusterCommand command;
  std::vector<TrajectoryPoint> predicted;
};

struct LoggedSample {
  PlantSample sample;
  double min_spatial_residual = 0.0;  // meters; +infinity without a region
};

struct ClosedLoopLog {
  std::vector<LoggedSample> samples;
  std::vector<ReplanRecord> replans;
  bool docked = false;
  double docked_time = -1.0;
};

// Alternates plan and zero-order-hold plant integration for `duration` seconds (a multiple
// of the interval length h). Stops early once docked for `success_replans` consecutive
// replans if configured to.
ClosedLoopLog run_closed_loop(const Scenario& scenario, double duration, const MpcConfig& config = {});

}  // namespace shipdock
