#include "shipdock/thrust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

// cos/sin that are exact at quarter turns, so axis-aligned thrusters give exact columns.
Eigen::Vector2d unit_direction(double alpha) {
  constexpr double kQuarter = std::numbers::pi / 2.0;
  const double turns = alpha / kQuarter;
  const double nearest = std::nearbyint(turns);
  if (std::abs(turns - nearest) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                        std::max(1.0, std::abs(turns))) {
    switch (static_cast<long long>(nearest) & 3) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return {std::cos(alpha), std::sin(alpha)};
}

Eigen::Vector3d column(double lx, double ly, double alpha) {
  const Eigen::Vector2d cs = unit_direction(alpha);
  return {cs[0], cs[1], lx * cs[1] - ly * cs[0]};
}

Eigen::Vector3d column_derivative(double lx, double ly, double alpha) {
  const Eigen::Vector2d cs = unit_direction(alpha);
  return {-cs[1], cs[0], lx * cs[0] + ly * cs[1]};
}

double effective_angle(const ThrusterSpec& spec, double alpha) {
  return spec.is_azimuth() ? alpha : spec.alpha_fixed;
}

double inverse_weight(const AllocationWeights& weights, int i) {
  return weights.w_diag.size() == 0 ? 1.0 : 1.0 / weights.w_diag[i];
}

void check_sizes(std::span<const ThrusterSpec> specs, std::span<const double> alphas) {
  if (alphas.size() != specs.size()) {
    throw DimensionMismatch("expected one angle per thruster");
  }
}

double det3(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  return a.dot(b.cross(c));
}

}  // namespace

void ThrusterSpec::validate() const {
  if (!(f_min <= f_max)) throw PreconditionError("thruster f_min must not exceed f_max");
  if (is_azimuth()) {
    if (!(alpha_min < alpha_max)) {
      throw PreconditionError("azimuth alpha_min must be below alpha_max");
    }
    if (!(alpha_rate_max > 0.0)) {
      throw PreconditionError("azimuth alpha_rate_max must be positive");
    }
  }
}

void AllocationWeights::validate(int num_thrusters) const {
  if (!(rho > 0.0)) throw PreconditionError("allocation weight rho must be positive");
  if (!(epsilon > 0.0)) throw PreconditionError("allocation weight epsilon must be positive");
  if (w_diag.size() != 0) {
    if (w_diag.size() != num_thrusters) {
      throw DimensionMismatch("W must have one diagonal entry per thruster");
    }
    if (!(w_diag.array() > 0.0).all()) {
      throw PreconditionError("W diagonal entries must be positive");
    }
  }
}

Eigen::Vector3d config_column(const ThrusterSpec& spec, double alpha) {
  if (spec.is_azimuth()) {
    if (alpha < spec.alpha_min || alpha > spec.alpha_max) {
      throw BoundViolation("azimuth angle " + std::to_string(alpha) + " outside sector [" +
                           std::to_string(spec.alpha_min) + ", " +
                           std::to_string(spec.alpha_max) + "]");
    }
  } else if (std::abs(alpha - spec.alpha_fixed) > 1e-12) {
    throw BoundViolation("fixed thruster angle differs from its mounting angle");
  }
  return column(spec.lx, spec.ly, alpha);
}

ConfigMatrix config_matrix(std::span<const ThrusterSpec> specs, std::span<const double> alphas) {
  check_sizes(specs, alphas);
  ConfigMatrix T(3, static_cast<Eigen::Index>(specs.size()));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    T.col(static_cast<Eigen::Index>(i)) =
        config_column(specs[i], effective_angle(specs[i], alphas[i]));
  }
  return T;
}

void validate_command(std::span<const ThrusterSpec> specs, const ThrusterCommand& command,
                      double tolerance) {
  if (command.alpha.size() != specs.size() || command.f.size() != specs.size()) {
    throw DimensionMismatch("command must carry one angle and one force per thruster");
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const ThrusterSpec& s = specs[i];
    if (command.f[i] < s.f_min - tolerance || command.f[i] > s.f_max + tolerance) {
      throw BoundViolation("thruster " + std::to_string(i + 1) + " force " +
                           std::to_string(command.f[i]) + " outside [" + std::to_string(s.f_min) +
                           ", " + std::to_string(s.f_max) + "]");
    }
    if (s.is_azimuth()) {
      if (command.alpha[i] < s.alpha_min - tolerance || command.alpha[i] > s.alpha_max + tolerance) {
        throw BoundViolation("thruster " + std::to_string(i + 1) + " angle outside its sector");
      }
    } else if (std::abs(command.alpha[i] - s.alpha_fixed) > tolerance) {
      throw BoundViolation("thruster " + std::to_string(i + 1) + " is fixed-angle");
    }
  }
}

Eigen::Vector3d generalized_force(std::span<const ThrusterSpec> specs,
                                  const ThrusterCommand& command) {
  validate_command(specs, command);
  Eigen::Vector3d tau = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    tau += command.f[i] * column(specs[i].lx, specs[i].ly, effective_angle(specs[i], command.alpha[i]));
  }
  return tau;
}

double manoeuvrability_determinant(std::span<const ThrusterSpec> specs,
                                   std::span<const double> alphas,
                                   const AllocationWeights& weights) {
  check_sizes(specs, alphas);
  Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Eigen::Vector3d t = column(specs[i].lx, specs[i].ly, effective_angle(specs[i], alphas[i]));
    G.noalias() += inverse_weight(weights, static_cast<int>(i)) * t * t.transpose();
  }
  return G(0, 0) * (G(1, 1) * G(2, 2) - G(1, 2) * G(2, 1)) -
         G(0, 1) * (G(1, 0) * G(2, 2) - G(1, 2) * G(2, 0)) +
         G(0, 2) * (G(1, 0) * G(2, 1) - G(1, 1) * G(2, 0));
}

double singularity_cost(std::span<const ThrusterSpec> specs, std::span<const double> alphas,
                        const AllocationWeights& weights) {
  return weights.rho / (weights.epsilon + manoeuvrability_determinant(specs, alphas, weights));
}

// The Gram determinant expands (Cauchy-Binet) into a weighted sum of squared 3x3 minors,
// each of which is linear in every column, so angle derivatives only swap columns.
SingularityDerivatives singularity_cost_derivatives(std::span<const ThrusterSpec> specs,
                                                    std::span<const double> alphas,
                                                    const AllocationWeights& weights) {
  check_sizes(specs, alphas);
  const int n = static_cast<int>(specs.size());
  std::vector<Eigen::Vector3d> t(n), dt(n), ddt(n);
  std::vector<bool> moves(n);
  for (int i = 0; i < n; ++i) {
    const double a = effective_angle(specs[i], alphas[i]);
    t[i] = column(specs[i].lx, specs[i].ly, a);
    dt[i] = column_derivative(specs[i].lx, specs[i].ly, a);
    ddt[i] = -t[i];
    moves[i] = specs[i].is_azimuth();
  }

  double det = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        const int idx[3] = {a, b, c};
        const double weight =
            inverse_weight(weights, a) * inverse_weight(weights, b) * inverse_weight(weights, c);
        auto minor = [&](int di, int dj) {
          // Column p is replaced by its first derivative when p == di or p == dj, and by its
          // second derivative when p == di == dj.
          Eigen::Vector3d cols[3];
          for (int p = 0; p < 3; ++p) {
            const int k = idx[p];
            const int order = (k == di) + (k == dj);
            cols[p] = order == 0 ? t[k] : (order == 1 ? dt[k] : ddt[k]);
          }
          return det3(cols[0], cols[1], cols[2]);
        };
        const double m0 = minor(-1, -1);
        det += weight * m0 * m0;
        double dm[3];
        for (int p = 0; p < 3; ++p) dm[p] = moves[idx[p]] ? minor(idx[p], -1) : 0.0;
        for (int p = 0; p < 3; ++p) {
          if (!moves[idx[p]]) continue;
          grad[idx[p]] += 2.0 * weight * m0 * dm[p];
          for (int q = 0; q < 3; ++q) {
            if (!moves[idx[q]]) continue;
            hess(idx[p], idx[q]) += 2.0 * weight * (dm[p] * dm[q] + m0 * minor(idx[p], idx[q]));
          }
        }
      }
    }
  }

  SingularityDerivatives out;
  out.determinant = det;
  const double denom = weights.epsilon + det;
  out.value = weights.rho / denom;
  out.gradient = -weights.rho / (denom * denom) * grad;
  out.hessian = 2.0 * weights.rho / (denom * denom * denom) * grad * grad.transpose() -
                weights.rho / (denom * denom) * hess;
  return out;
}

ThrustLimits derive_thrust_limits(double mass_m, double gravity_g) {
  const double weight = mass_m * gravity_g;
  return {weight / 30.0, weight / 60.0};
}

double slew_limit(double turnaround_seconds) {
  if (!(turnaround_seconds > 0.0)) throw PreconditionError("turnaround time must be positive");
  return 2.0 * std::numbers::pi / turnaround_seconds;
}

std::vector<ThrusterSpec> northern_clipper_thrusters(double mass_m, double gravity_g) {
  const ThrustLimits limits = derive_thrust_limits(mass_m, gravity_g);
  const double sector = 170.0 * std::numbers::pi / 180.0;
  const double rate = slew_limit(30.0);

  // Body y points to starboard.
  ThrusterSpec starboard;
  starboard.kind = ThrusterKind::kAzimuth;
  starboard.lx = -35.0;
  starboard.ly = 7.0;
  starboard.alpha_min = -sector;
  starboard.alpha_max = sector;
  starboard.f_min = 0.0;
  starboard.f_max = limits.azimuth_f_max;
  starboard.alpha_rate_max = rate;

  ThrusterSpec port = starboard;
  port.ly = -7.0;

  ThrusterSpec tunnel;
  tunnel.kind = ThrusterKind::kFixed;
  tunnel.lx = 35.0;
  tunnel.ly = 0.0;
  tunnel.alpha_fixed = std::numbers::pi / 2.0;
  tunnel.f_min = -limits.tunnel_f_max;
  tunnel.f_max = limits.tunnel_f_max;

  return {starboard, port, tunnel};
}

}  // namespace shipdock
