#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "shipdock/error.hpp"
#include "shipdock/thrust.hpp"
#include "shipdock/vessel_model.hpp"

namespace shipdock {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<ThrusterSpec> preset() {
  const VesselParams p = northern_clipper_params();
  return northern_clipper_thrusters(p.mass_m, p.gravity_g);
}

TEST(NorthernClipper, LayoutAndLimits) {
  const auto specs = preset();
  ASSERT_EQ(specs.size(), 3u);
  const double mg = 6.0e6 * 9.8;
  for (int i = 0; i < 2; ++i) {
    EXPECT_TRUE(specs[i].is_azimuth());
    EXPECT_DOUBLE_EQ(specs[i].lx, -35.0);
    EXPECT_DOUBLE_EQ(std::abs(specs[i].ly), 7.0);
    EXPECT_DOUBLE_EQ(specs[i].f_min, 0.0);
    EXPECT_DOUBLE_EQ(specs[i].f_max, mg / 30.0);
    EXPECT_NEAR(specs[i].alpha_max, 170.0 * kPi / 180.0, 1e-15);
    EXPECT_NEAR(specs[i].alpha_min, -170.0 * kPi / 180.0, 1e-15);
    EXPECT_DOUBLE_EQ(specs[i].alpha_rate_max, 2.0 * kPi / 30.0);
  }
  EXPECT_FALSE(specs[2].is_azimuth());
  EXPECT_DOUBLE_EQ(specs[2].lx, 35.0);
  EXPECT_DOUBLE_EQ(specs[2].alpha_fixed, kPi / 2.0);
  EXPECT_DOUBLE_EQ(specs[2].f_max, mg / 60.0);
  EXPECT_DOUBLE_EQ(specs[2].f_min, -mg / 60.0);
}

TEST(ConfigMatrix, ZeroAnglesIsExact) {
  const auto specs = preset();
  const std::vector<double> alphas = {0.0, 0.0, kPi / 2.0};
  const ConfigMatrix T = config_matrix(specs, alphas);
  Eigen::Matrix3d expected;
  expected << 1, 1, 0, 0, 0, 1, -7, 7, 35;
  // Fixed-thruster angle: sin(pi/2) is exactly 1, cos(pi/2) rounds to 6e-17.
  EXPECT_EQ(T(0, 0), 1.0);
  EXPECT_EQ(T(0, 1), 1.0);
  EXPECT_EQ(T(1, 0), 0.0);
  EXPECT_EQ(T(1, 1), 0.0);
  EXPECT_EQ(T(1, 2), 1.0);
  EXPECT_EQ(T(2, 0), -7.0);
  EXPECT_EQ(T(2, 1), 7.0);
  EXPECT_EQ(T(2, 2), 35.0);
  EXPECT_NEAR(T(0, 2), 0.0, 1e-15);
  const Eigen::Matrix3d TTt = T * T.transpose();
  EXPECT_NEAR(TTt.determinant(), 196.0, 1e-9);
  AllocationWeights w;
  EXPECT_NEAR(manoeuvrability_determinant(specs, alphas, w), 196.0, 1e-9);
}

TEST(ConfigMatrix, ColumnFormula) {
  ThrusterSpec s;
  s.lx = -30.0;
  s.ly = 5.0;
  s.alpha_min = -3.0;
  s.alpha_max = 3.0;
  s.f_max = 1.0;
  s.alpha_rate_max = 0.1;
  const double a = 0.4;
  const Eigen::Vector3d c = config_column(s, a);
  EXPECT_DOUBLE_EQ(c[0], std::cos(a));
  EXPECT_DOUBLE_EQ(c[1], std::sin(a));
  EXPECT_DOUBLE_EQ(c[2], -30.0 * std::sin(a) - 5.0 * std::cos(a));
  EXPECT_THROW(config_column(s, 3.1), BoundViolation);
}

TEST(Singularity, AlignedAzimuthsCostRhoOverEpsilon) {
  // Both azimuths and the tunnel push sideways: T has rank 2.
  const auto specs = preset();
  const std::vector<double> alphas = {kPi / 2.0, kPi / 2.0, kPi / 2.0};
  AllocationWeights w;
  EXPECT_EQ(singularity_cost(specs, alphas, w), w.rho / w.epsilon);
  EXPECT_EQ(manoeuvrability_determinant(specs, alphas, w), 0.0);
}

TEST(Singularity, DeterminantMatchesEigen) {
  const auto specs = preset();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> angle(-2.9, 2.9);
  AllocationWeights w;
  w.w_diag = Eigen::Vector3d(1.0, 2.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> alphas = {angle(rng), angle(rng), kPi / 2.0};
    const ConfigMatrix T = config_matrix(specs, alphas);
    const Eigen::Matrix3d A = T * w.w_diag.cwiseInverse().asDiagonal() * T.transpose();
    const double det = manoeuvrability_determinant(specs, alphas, w);
    EXPECT_NEAR(det, A.determinant(), 1e-9 * std::max(1.0, std::abs(det)));
    EXPECT_NEAR(singularity_cost(specs, alphas, w), w.rho / (w.epsilon + A.determinant()), 1e-9);
  }
}

TEST(Singularity, DerivativesMatchFiniteDifferences) {
  const auto specs = preset();
  AllocationWeights w;
  const std::vector<double> base = {0.3, -1.1, kPi / 2.0};
  const SingularityDerivatives d = singularity_cost_derivatives(specs, base, w);
  EXPECT_DOUBLE_EQ(d.value, singularity_cost(specs, base, w));
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    std::vector<double> p = base, m = base;
    p[i] += h;
    m[i] -= h;
    const double fd = (singularity_cost(specs, p, w) - singularity_cost(specs, m, w)) / (2 * h);
    EXPECT_NEAR(d.gradient[i], fd, 1e-7 * std::max(1.0, std::abs(fd)));
    const SingularityDerivatives dp = singularity_cost_derivatives(specs, p, w);
    const SingularityDerivatives dm = singularity_cost_derivatives(specs, m, w);
    for (int j = 0; j < 2; ++j) {
      const double fd2 = (dp.gradient[j] - dm.gradient[j]) / (2 * h);
      EXPECT_NEAR(d.hessian(j, i), fd2, 1e-6 * std::max(1.0, std::abs(fd2)));
    }
  }
  EXPECT_DOUBLE_EQ(d.gradient[2], 0.0);
}

TEST(GeneralizedForce, EqualsConfigMatrixTimesForces) {
  const auto specs = preset();
  ThrusterCommand cmd{{0.2, -0.5, kPi / 2.0}, {1e5, 3e5, -2e5}};
  const Eigen::Vector3d tau = generalized_force(specs, cmd);
  const Eigen::Vector3d expected =
      config_matrix(specs, cmd.alpha) * Eigen::Vector3d(cmd.f[0], cmd.f[1], cmd.f[2]);
  EXPECT_TRUE(tau.isApprox(expected, 1e-14));
}

TEST(ValidateCommand, RejectsOutOfRangeEntries) {
  const auto specs = preset();
  EXPECT_NO_THROW(validate_command(specs, {{0.0, 0.0, kPi / 2.0}, {0.0, 0.0, 0.0}}));
  EXPECT_THROW(validate_command(specs, {{0.0, 0.0, kPi / 2.0}, {-1.0, 0.0, 0.0}}), BoundViolation);
  EXPECT_THROW(validate_command(specs, {{3.1, 0.0, kPi / 2.0}, {0.0, 0.0, 0.0}}), BoundViolation);
  EXPECT_THROW(validate_command(specs, {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}), BoundViolation);
}

TEST(Limits, DerivedFromDryWeight) {
  const ThrustLimits l = derive_thrust_limits(6.0e6, 9.8);
  EXPECT_DOUBLE_EQ(l.azimuth_f_max, 6.0e6 * 9.8 / 30.0);
  EXPECT_DOUBLE_EQ(l.tunnel_f_max, 6.0e6 * 9.8 / 60.0);
  EXPECT_DOUBLE_EQ(slew_limit(30.0), 2.0 * kPi / 30.0);
  EXPECT_THROW(slew_limit(0.0), PreconditionError);
}

}  // namespace
}  // namespace shipdock
