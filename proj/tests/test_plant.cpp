#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "shipdock/error.hpp"
#include "shipdock/plant.hpp"

namespace shipdock {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Rk4, SurgeStepResponseMatchesClosedForm) {
  // Pure surge force: u(t) = (F / d)(1 - exp(-d t / m)) with d = D00, m = M00, and
  // x(t) = (F / d)(t - (m / d)(1 - exp(-d t / m))).
  const ModelMatrices model = assemble_model(northern_clipper_params());
  const double F = 5e5;
  const double m = model.M(0, 0);
  const double d = model.D(0, 0);
  Vector6d z = Vector6d::Zero();
  const Eigen::Vector3d tau(F, 0, 0);
  for (int i = 0; i < 600; ++i) z = rk4_step(z, tau, model, 0.1);
  const double t = 60.0;
  const double u = F / d * (1 - std::exp(-d * t / m));
  const double x = F / d * (t - m / d * (1 - std::exp(-d * t / m)));
  EXPECT_NEAR(z[3], u, 1e-10);
  EXPECT_NEAR(z[0], x, 1e-8);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
  EXPECT_DOUBLE_EQ(z[2], 0.0);
}

TEST(Rk4, FourthOrderConvergence) {
  const ModelMatrices model = assemble_model(northern_clipper_params());
  Vector6d z0;
  z0 << 0, 0, 0.2, 3.0, 0.5, 0.05;
  const Eigen::Vector3d tau(1e5, 4e5, 2e7);
  auto run = [&](double dt) {
    Vector6d z = z0;
    const int steps = static_cast<int>(std::lround(20.0 / dt));
    for (int i = 0; i < steps; ++i) z = rk4_step(z, tau, model, dt);
    return z;
  };
  const Vector6d ref = run(0.01);
  const double e1 = (run(1.0) - ref).norm();
  const double e2 = (run(0.5) - ref).norm();
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
}

TEST(Rk4, RejectsBadStep) {
  const ModelMatrices model = assemble_model(northern_clipper_params());
  EXPECT_THROW(rk4_step(Vector6d::Zero(), Eigen::Vector3d::Zero(), model, 0.0), PreconditionError);
  EXPECT_THROW(rk4_step(Vector6d::Zero(), Eigen::Vector3d::Zero(), model, 1.5), PreconditionError);
}

TEST(Slew, RateLimited) {
  EXPECT_DOUBLE_EQ(slew_toward(0.0, 1.0, 0.1, 2.0), 0.2);
  EXPECT_DOUBLE_EQ(slew_toward(0.0, -1.0, 0.1, 2.0), -0.2);
  EXPECT_DOUBLE_EQ(slew_toward(0.0, 0.1, 0.1, 2.0), 0.1);
}

TEST(SimulateInterval, TraceAndSlew) {
  const VesselParams p = northern_clipper_params();
  const ModelMatrices model = assemble_model(p);
  const auto specs = northern_clipper_thrusters(p.mass_m, p.gravity_g);
  const std::vector<double> previous = {0.0, 0.0, kPi / 2.0};
  const ThrusterCommand cmd{{kPi / 2.0, -1.0, kPi / 2.0}, {1e5, 2e5, 0.0}};
  const auto trace = simulate_interval(Vector6d::Zero(), cmd, previous, model, specs, 10.0, 0.1, 20.0);
  ASSERT_EQ(trace.size(), 101u);
  EXPECT_DOUBLE_EQ(trace.front().t, 20.0);
  EXPECT_NEAR(trace.back().t, 30.0, 1e-12);
  const double rate = 2.0 * kPi / 30.0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    for (int a = 0; a < 2; ++a) {
      EXPECT_LE(std::abs(trace[i].alpha[a] - trace[i - 1].alpha[a]), rate * 0.1 + 1e-12);
    }
    EXPECT_EQ(trace[i].f, cmd.f);
  }
  // pi/2 takes 7.5 s at 12 deg/s; 1 rad takes 4.77 s.
  EXPECT_DOUBLE_EQ(trace.back().alpha[0], kPi / 2.0);
  EXPECT_DOUBLE_EQ(trace.back().alpha[1], -1.0);
  EXPECT_NEAR(trace[10].alpha[0], rate * 1.0, 1e-12);
}

TEST(SimulateInterval, RejectsBadArguments) {
  const VesselParams p = northern_clipper_params();
  const ModelMatrices model = assemble_model(p);
  const auto specs = northern_clipper_thrusters(p.mass_m, p.gravity_g);
  const std::vector<double> previous = {0.0, 0.0, kPi / 2.0};
  const ThrusterCommand ok{{0.0, 0.0, kPi / 2.0}, {0.0, 0.0, 0.0}};
  EXPECT_THROW(simulate_interval(Vector6d::Zero(), ok, previous, model, specs, 0.25, 0.1), PreconditionError);
  const ThrusterCommand bad{{0.0, 0.0, kPi / 2.0}, {-1.0, 0.0, 0.0}};
  EXPECT_ANY_THROW(simulate_interval(Vector6d::Zero(), bad, previous, model, specs, 1.0, 0.1));
}

}  // namespace
}  // namespace shipdock
