#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace shipdock {

using ConfigMatrix = Eigen::Matrix<double, 3, Eigen::Dynamic>;

enum class ThrusterKind { kAzimuth, kFixed };

struct ThrusterSpec {
  ThrusterKind kind = ThrusterKind::kAzimuth;
  double lx = 0.0;
  double ly = 0.0;
  double alpha_fixed = 0.0;  // fixed-angle thrusters only
  double alpha_min = 0.0;    // azimuth only
  double alpha_max = 0.0;    // azimuth only
  double f_min = 0.0;
  double f_max = 0.0;
  double alpha_rate_max = 0.0;  // azimuth only, rad/s

  bool is_azimuth() const { return kind == ThrusterKind::kAzimuth; }
  // Throws PreconditionError when the bounds are inconsistent.
  void validate() const;
};

// One angle and one force per thruster. Fixed thrusters carry their fixed angle.
struct ThrusterCommand {
  std::vector<double> alpha;
  std::vector<double> f;
};

struct AllocationWeights {
  double rho = 1.0;
  double epsilon = 1e-3;
  Eigen::VectorXd w_diag;  // diagonal of W; empty means identity

  void validate(int num_thrusters) const;
};

// Column T_i(alpha) = [cos a, sin a, lx sin a - ly cos a]. Throws BoundViolation when alpha
// is outside the azimuth sector or differs from a fixed thruster's angle.
Eigen::Vector3d config_column(const ThrusterSpec& spec, double alpha);

// 3 x n configuration matrix; entries of `alphas` for fixed thrusters are ignored.
ConfigMatrix config_matrix(std::span<const ThrusterSpec> specs, std::span<const double> alphas);

// tau = T(alpha) f for a validated command.
Eigen::Vector3d generalized_force(std::span<const ThrusterSpec> specs,
                                  const ThrusterCommand& command);

// Throws BoundViolation if any angle or force is outside its spec by more than `tolerance`.
void validate_command(std::span<const ThrusterSpec> specs, const ThrusterCommand& command,
                      double tolerance = 1e-9);

// det(T W^-1 T^T), evaluated with the closed-form 3x3 determinant.
double manoeuvrability_determinant(std::span<const ThrusterSpec> specs,
                                   std::span<const double> alphas,
                                   const AllocationWeights& weights);

// rho / (epsilon + det(T W^-1 T^T)).
double singularity_cost(std::span<const ThrusterSpec> specs, std::span<const double> alphas,
                        const AllocationWeights& weights);

struct SingularityDerivatives {
  double value = 0.0;
  double determinant = 0.0;
  Eigen::VectorXd gradient;  // d/d alpha_i, zero for fixed thrusters
  Eigen::MatrixXd hessian;
};

// Value, gradient and Hessian of the singularity cost with respect to the thruster angles.
// Angle bounds are not checked here so the function can be used inside derivative tests.
SingularityDerivatives singularity_cost_derivatives(std::span<const ThrusterSpec> specs,
                                                    std::span<const double> alphas,
                                                    const AllocationWeights& weights);

struct ThrustLimits {
  double azimuth_f_max = 0.0;  // azimuth range is [0, azimuth_f_max]
  double tunnel_f_max = 0.0;   // tunnel range is [-tunnel_f_max, tunnel_f_max]
};

// Azimuth limit is 1/30 and tunnel limit 1/60 of the dry weight m g.
ThrustLimits derive_thrust_limits(double mass_m, double gravity_g);

// Maximum azimuth rate for a full revolution in `turnaround_seconds`.
double slew_limit(double turnaround_seconds);

// Two stern azimuths at (-35, +-7) m and a bow tunnel thruster at (35, 0) m, +-170 deg
// sectors and a 30 s turnaround.
std::vector<ThrusterSpec> northern_clipper_thrusters(double mass_m, double gravity_g);

}  // namespace shipdock
