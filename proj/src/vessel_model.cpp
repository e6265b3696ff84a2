#include "shipdock/vessel_model.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "shipdock/error.hpp"

namespace shipdock {

double wrap_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(theta, kTwoPi);
  if (wrapped <= -std::numbers::pi) wrapped += kTwoPi;
  return wrapped;
}

Pose::Pose(double x, double y, double psi) : x_(x), y_(y), psi_(wrap_angle(psi)) {}

Eigen::Matrix3d rotation_full(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Eigen::Matrix3d J;
  J << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return J;
}

Eigen::Matrix2d rotation_planar(double psi) {
  return rotation_full(psi).topLeftCorner<2, 2>();
}

ModelMatrices assemble_model(const VesselParams& params) {
  if (!(params.length_L > 0.0) || !(params.mass_m > 0.0) || !(params.gravity_g > 0.0)) {
    throw PreconditionError("assemble_model: length, mass and gravity must be positive");
  }
  const Eigen::Matrix3d N = Eigen::Vector3d(1.0, 1.0, params.length_L).asDiagonal();
  ModelMatrices out;
  out.M = params.mass_m * N * params.M_bis * N;
  out.D = params.mass_m * std::sqrt(params.gravity_g / params.length_L) * N * params.D_bis * N;

  const Eigen::FullPivLU<Eigen::Matrix3d> lu(out.M);
  if (!lu.isInvertible()) {
    throw AssemblyError("assemble_model: inertia matrix is singular");
  }
  out.M_inv = lu.inverse();
  const double residual = (out.M * out.M_inv - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-10)) {
    throw AssemblyError("assemble_model: inertia matrix is numerically singular");
  }
  return out;
}

StateDerivative dynamics(const Pose& eta, const Velocity& nu, const Eigen::Vector3d& tau,
                         const ModelMatrices& model) {
  const Eigen::Vector3d v = nu.vector();
  return {rotation_full(eta.psi()) * v, model.M_inv * (tau - model.D * v)};
}

Vector6d dynamics(const Vector6d& state, const Eigen::Vector3d& tau, const ModelMatrices& model) {
  const Eigen::Vector3d nu = state.tail<3>();
  Vector6d out;
  out.head<3>() = rotation_full(state[2]) * nu;
  out.tail<3>() = model.M_inv * (tau - model.D * nu);
  return out;
}

Matrix6d dynamics_state_jacobian(const Vector6d& state, const ModelMatrices& model) {
  const double psi = state[2];
  const double u = state[3];
  const double v = state[4];
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Matrix6d jac = Matrix6d::Zero();
  jac(0, 2) = -u * s - v * c;
  jac(1, 2) = u * c - v * s;
  jac.topRightCorner<3, 3>() = rotation_full(psi);
  jac.bottomRightCorner<3, 3>() = -model.M_inv * model.D;
  return jac;
}

VesselParams northern_clipper_params() {
  VesselParams p;
  p.length_L = 76.2;
  p.mass_m = 6000e3;
  p.gravity_g = 9.8;
  p.M_bis << 1.1274, 0.0, 0.0,
             0.0, 1.8902, -0.0744,
             0.0, -0.0744, 0.1278;
  p.D_bis << 0.0358, 0.0, 0.0,
             0.0, 0.1183, -0.0124,
             0.0, -0.0041, 0.0308;
  p.hull_vertices = {{39.0, 0.0}, {20.0, 9.0}, {-39.0, 9.0}, {-39.0, -9.0}, {20.0, -9.0}};
  return p;
}

}  // namespace shipdock
