#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shipdock/geometry.hpp"
#include "shipdock/thrust.hpp"
#include "shipdock/vessel_model.hpp"

namespace shipdock {

// Stage-cost weights, applied to scaled variables (see ocp.hpp for the scaling).
struct Weights {
  Eigen::Matrix3d Q_eta = Eigen::Vector3d(1.0, 1.0, 4.0).asDiagonal();
  Eigen::Matrix3d Q_nu = Eigen::Matrix3d::Identity();
  Eigen::MatrixXd R_f;  // n x n; empty means 0.01 I
  AllocationWeights allocation;

  // Throws PreconditionError unless every block is symmetric positive semidefinite.
  void validate(int num_thrusters) const;
  Eigen::MatrixXd thrust_weight(int num_thrusters) const;
};

struct HorizonSettings {
  double horizon_T = 300.0;
  int intervals_N = 30;
  int degree = 3;

  double interval_length() const { return horizon_T / intervals_N; }
};

// Everything needed to pose and run one docking problem.
struct Scenario {
  std::string name;
  VesselParams vessel;
  std::vector<ThrusterSpec> thrusters;
  std::optional<ConvexPolygon> region;  // absent: open water
  Pose desired;
  Pose initial_pose;
  Velocity initial_velocity;
  std::vector<double> initial_alpha;  // one per thruster; fixed thrusters carry their angle
  Weights weights;
  HorizonSettings horizon;
  double safety_margin = 0.1;

  int num_azimuths() const;
  // Hull dilated by the safety margin (body frame).
  ConvexPolygon safety_polygon() const;
};

}  // namespace shipdock
