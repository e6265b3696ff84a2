#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shipdock/collocation.hpp"
#include "shipdock/nlp.hpp"
#include "shipdock/scenario.hpp"

namespace shipdock {

// Internal unit of each decision variable; the solver sees value / scale.
struct VariableScaling {
  double position = 100.0;  // m
  double velocity = 1.0;    // m/s
  double yaw_rate = 0.1;    // rad/s
  double angle = 3.14159265358979323846;  // rad, for heading and azimuth angles
  std::vector<double> force;  // per thruster, max(|f_min|, |f_max|)

  static VariableScaling for_thrusters(std::span<const ThrusterSpec> specs);
  // [position, position, angle, velocity, velocity, yaw_rate]
  Vector6d state() const;
};

// Index map of the decision vector. Storage is interval-major: for each interval k the
// boundary state z_k, the d collocation states, the n forces and the azimuth angles, followed
// by the final boundary state z_N.
class DecisionLayout {
 public:
  DecisionLayout(int intervals, int degree, int num_thrusters, int num_azimuths);

  int intervals() const { return intervals_; }
  int degree() const { return degree_; }
  int num_thrusters() const { return num_thrusters_; }
  int num_azimuths() const { return num_azimuths_; }
  int interval_stride() const { return stride_; }
  int dimension() const { return intervals_ * stride_ + 6; }

  int boundary(int k) const;                // k in [0, N]
  int collocation(int k, int j) const;      // j in [1, d]; j = 0 aliases boundary(k)
  int force(int k) const;                   // k in [0, N)
  int alpha(int k) const;                   // k in [0, N)

 private:
  int intervals_;
  int degree_;
  int num_thrusters_;
  int num_azimuths_;
  int stride_;
};

// Physical state and actuator angles at the start of the horizon.
struct InitialCondition {
  Vector6d state = Vector6d::Zero();  // [x, y, psi, u, v, r]; psi may be unwrapped
  std::vector<double> alpha;          // one per thruster; fixed thrusters carry their angle
};

// ||eta - eta_d||^2_Q_eta + ||nu||^2_Q_nu + ||f||^2_R_f + singularity cost, all on scaled
// quantities. The heading error is wrapped before weighting. `alphas` has one entry per
// thruster.
double stage_cost(const Vector6d& state, std::span<const double> f, std::span<const double> alphas,
                  const Pose& desired, const Weights& weights, std::span<const ThrusterSpec> specs,
                  const VariableScaling& scaling);

struct TranscriptionOptions {
  // Multiplies the objective; the constraints are unaffected.
  double objective_scale = 1.0;
  // lagrangian_hessian returns the exact Hessian instead of the solver approximation, which
  // drops the curvature of the thrust mapping T(alpha) f and keeps only the positive
  // semidefinite part of each interval's (f, alpha) block. The exact block is indefinite
  // wherever a force sits at a bound.
  bool exact_hessian = false;
};

struct TrajectoryPoint {
  double t = 0.0;
  Pose pose;  // heading wrapped
  Velocity velocity;
  ThrusterCommand command;  // controls of the interval starting here (last interval at t = T)
};

// Collocation transcription of the docking problem in scaled variables.
//
// Equalities: initial state (6), then per interval the d collocation defects and the
// continuity block (6 each). Inequalities: per interval the containment rows of the boundary
// state (except z_0, which is pinned by the initial condition) and of each collocation state,
// then two slew rows per azimuth, and finally the containment rows of z_N. Containment rows
// are divided by the position scale; slew rows are in units of the angle scale.
class DockingNlp final : public Nlp {
 public:
  DockingNlp(const Scenario& scenario, const InitialCondition& initial,
             const TranscriptionOptions& options = {});

  const DecisionLayout& layout() const { return layout_; }
  const VariableScaling& scaling() const { return scaling_; }
  const CollocationGrid& grid() const { return grid_; }
  const Scenario& scenario() const { return scenario_; }
  const InitialCondition& initial_condition() const { return initial_; }
  // Diagnostics raised during construction (e.g. initial pose outside the region).
  const std::vector<std::string>& warnings() const { return warnings_; }
  int containment_rows_per_point() const;

  int num_variables() const override { return layout_.dimension(); }
  int num_equalities() const override;
  int num_inequalities() const override;
  Eigen::VectorXd lower_bounds() const override { return lower_; }
  Eigen::VectorXd upper_bounds() const override { return upper_; }
  // Initial state at every node, zero force, initial azimuth angles.
  Eigen::VectorXd initial_guess() const override;

  double objective(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd equalities(const Eigen::VectorXd& x) const override;
  SparseMatrix equality_jacobian(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd inequalities(const Eigen::VectorXd& x) const override;
  SparseMatrix inequality_jacobian(const Eigen::VectorXd& x) const override;
  SparseMatrix lagrangian_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                                  const Eigen::VectorXd& z_in) const override;

  // Physical state of node (k, j) (j = 0 is the boundary state).
  Vector6d node_state(const Eigen::VectorXd& x, int k, int j) const;
  Vector6d boundary_state(const Eigen::VectorXd& x, int k) const { return node_state(x, k, 0); }
  // Physical command of interval k; fixed thrusters carry their angle.
  ThrusterCommand command(const Eigen::VectorXd& x, int k) const;
  // Minimum containment residual in meters over all boundary and collocation states
  // (+infinity without a region).
  double min_containment_residual(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd control_alphas(const Eigen::VectorXd& x, int k) const;
  double node_cost(const Eigen::VectorXd& x, int k, int j, double weight,
                   Eigen::VectorXd* grad) const;
  SparseMatrix hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                       const Eigen::VectorXd& z_in, bool exact) const;

  Scenario scenario_;
  InitialCondition initial_;
  TranscriptionOptions options_;
  CollocationGrid grid_;
  DecisionLayout layout_;
  VariableScaling scaling_;
  ModelMatrices model_;
  HalfspaceSet halfspaces_;
  std::vector<Point2> safety_points_;
  std::vector<int> azimuth_index_;  // thruster index of each azimuth
  Eigen::MatrixXd R_f_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  std::vector<std::string> warnings_;
};

// Boundary states at t = k h with the controls of each interval; heading wrapped.
std::vector<TrajectoryPoint> extract_trajectory(const DockingNlp& nlp, const Eigen::VectorXd& x);

// Builds a decision vector from physical boundary states, per-interval commands and
// (optionally) collocation states; missing collocation states are filled by linear
// interpolation between boundaries.
Eigen::VectorXd pack_solution(const DockingNlp& nlp, const std::vector<Vector6d>& boundary,
                              const std::vector<ThrusterCommand>& commands,
                              const std::vector<std::vector<Vector6d>>& collocation = {});

}  // namespace shipdock
