#pragma once

#include <vector>

#include <Eigen/Core>

namespace shipdock {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Wraps an angle to (-pi, pi].
double wrap_angle(double theta);

// Earth-fixed (NED) planar pose. Heading is stored wrapped to (-pi, pi].
class Pose {
 public:
  Pose() = default;
  Pose(double x, double y, double psi);

  double x() const { return x_; }
  double y() const { return y_; }
  double psi() const { return psi_; }
  Eigen::Vector3d vector() const { return {x_, y_, psi_}; }

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double psi_ = 0.0;
};

// Body-fixed surge/sway/yaw-rate velocities.
struct Velocity {
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;

  Eigen::Vector3d vector() const { return {u, v, r}; }
  static Velocity from_vector(const Eigen::Vector3d& nu) { return {nu[0], nu[1], nu[2]}; }
};

// Non-dimensional (bis-system) vessel description.
struct VesselParams {
  double length_L = 0.0;
  double mass_m = 0.0;
  double gravity_g = 0.0;
  Eigen::Matrix3d M_bis = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d D_bis = Eigen::Matrix3d::Zero();
  std::vector<Eigen::Vector2d> hull_vertices;
};

struct ModelMatrices {
  Eigen::Matrix3d M;
  Eigen::Matrix3d D;
  Eigen::Matrix3d M_inv;
};

struct StateDerivative {
  Eigen::Vector3d eta_dot;
  Eigen::Vector3d nu_dot;
};

// Body-to-earth rotation J(psi) acting on [u, v, r].
Eigen::Matrix3d rotation_full(double psi);

// Planar body-to-NED rotation R(psi).
Eigen::Matrix2d rotation_planar(double psi);

// M = m N M_bis N and D = m sqrt(g/L) N D_bis N with N = diag(1, 1, L).
// Throws PreconditionError for non-positive L, m, g and AssemblyError for singular M.
ModelMatrices assemble_model(const VesselParams& params);

// eta_dot = J(psi) nu, nu_dot = M^-1 (tau - D nu).
StateDerivative dynamics(const Pose& eta, const Velocity& nu, const Eigen::Vector3d& tau,
                         const ModelMatrices& model);

// Same dynamics on a stacked [x, y, psi, u, v, r] state; psi need not be wrapped.
Vector6d dynamics(const Vector6d& state, const Eigen::Vector3d& tau, const ModelMatrices& model);

// d(state_dot)/d(state) of the stacked dynamics. The tau sensitivity is [0; M^-1].
Matrix6d dynamics_state_jacobian(const Vector6d& state, const ModelMatrices& model);

// SV Northern Clipper parameters (MSS toolbox values) with the five-vertex hull outline.
VesselParams northern_clipper_params();

}  // namespace shipdock
