#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "shipdock/collocation.hpp"
#include "shipdock/derivative_check.hpp"
#include "shipdock/ocp.hpp"
#include "shipdock/plant.hpp"

namespace shipdock {
namespace {

constexpr double kPi = std::numbers::pi;

Scenario harbor() {
  Scenario s;
  s.name = "test-harbor";
  s.vessel = northern_clipper_params();
  s.thrusters = northern_clipper_thrusters(s.vessel.mass_m, s.vessel.gravity_g);
  s.region = ConvexPolygon::from_vertices({{-150, -100}, {300, -100}, {450, 60}, {300, 160}, {-150, 160}});
  s.desired = Pose(250.0, 60.0, kPi / 2.0);
  s.initial_pose = Pose(0.0, 0.0, 0.3);
  s.initial_alpha = {0.0, 0.0, kPi / 2.0};
  return s;
}

InitialCondition at_rest(const Scenario& s) {
  InitialCondition ic;
  ic.state << s.initial_pose.vector(), s.initial_velocity.vector();
  ic.alpha = s.initial_alpha;
  return ic;
}

TEST(DockingNlp, ProblemDimensions) {
  const Scenario s = harbor();
  const DockingNlp nlp(s, at_rest(s));
  // Per interval: 6 (d + 1) states, 3 forces, 2 azimuth angles; plus the final state.
  EXPECT_EQ(nlp.num_variables(), 30 * (24 + 3 + 2) + 6);
  EXPECT_EQ(nlp.num_variables(), 876);
  // Initial condition, then d defects and one continuity block per interval.
  EXPECT_EQ(nlp.num_equalities(), 6 + 30 * 6 * 4);
  // Five hull vertices times five region edges per constrained state (3 for interval 0,
  // 4 for the others, plus z_N) and two slew rows per azimuth and interval.
  EXPECT_EQ(nlp.num_inequalities(), 25 * (3 + 29 * 4 + 1) + 30 * 4);
  EXPECT_EQ(nlp.num_inequalities(), 3120);
}

TEST(DockingNlp, OpenWaterHasNoContainmentRows) {
  Scenario s = harbor();
  s.region.reset();
  const DockingNlp nlp(s, at_rest(s));
  EXPECT_EQ(nlp.num_inequalities(), 30 * 4);
  EXPECT_TRUE(std::isinf(nlp.min_containment_residual(nlp.initial_guess())));
}

TEST(DockingNlp, DerivativesMatchFiniteDifferences) {
  const Scenario s = harbor();
  const DockingNlp nlp(s, at_rest(s));
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Eigen::VectorXd x = random_point(nlp, nlp.initial_guess(), 2.0, seed);
    const DerivativeReport r = derivative_check(nlp, x);
    EXPECT_LE(r.max_relative_error(), 1e-6) << r.describe();
  }
}

TEST(DockingNlp, DerivativesAreDegreeIndependent) {
  Scenario s = harbor();
  s.horizon = {60.0, 6, 1};
  const DockingNlp nlp(s, at_rest(s));
  const Eigen::VectorXd x = random_point(nlp, nlp.initial_guess(), 2.0, 11);
  EXPECT_LE(derivative_check(nlp, x).max_relative_error(), 1e-6);
}

TEST(DockingNlp, ExactHessianMatchesFiniteDifferences) {
  Scenario s = harbor();
  s.horizon = {60.0, 6, 2};
  TranscriptionOptions opt;
  opt.exact_hessian = true;
  const DockingNlp nlp(s, at_rest(s), opt);
  std::mt19937 rng(3);
  std::normal_distribution<double> normal;
  const Eigen::VectorXd x = random_point(nlp, nlp.initial_guess(), 1.0, 5);
  const Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(nlp.num_equalities(), [&] { return normal(rng); });
  const Eigen::VectorXd z = Eigen::VectorXd::NullaryExpr(nlp.num_inequalities(), [&] { return std::abs(normal(rng)); });
  const DerivativeReport r = hessian_check(nlp, x, y, z);
  EXPECT_LE(r.max_relative_error(), 1e-6) << r.describe();
}

TEST(DockingNlp, DefaultHessianIsPositiveSemidefiniteWithoutConstraintCurvature) {
  // With zero multipliers only the objective contributes, and the control blocks are
  // projected; the result must have no negative eigenvalues.
  Scenario s = harbor();
  s.horizon = {40.0, 4, 2};
  const DockingNlp nlp(s, at_rest(s));
  const Eigen::VectorXd x = random_point(nlp, nlp.initial_guess(), 1.0, 9);
  const Eigen::MatrixXd H = Eigen::MatrixXd(nlp.lagrangian_hessian(
      x, Eigen::VectorXd::Zero(nlp.num_equalities()), Eigen::VectorXd::Zero(nlp.num_inequalities())));
  EXPECT_LT((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().minCoeff(), -1e-8);
}

TEST(DockingNlp, EquilibriumHasZeroDefectsAndSingularityOnlyCost) {
  Scenario s = harbor();
  s.initial_pose = s.desired;
  const DockingNlp nlp(s, at_rest(s));
  const int N = s.horizon.intervals_N;
  Vector6d z;
  z << s.desired.vector(), 0, 0, 0;
  const std::vector<Vector6d> boundary(N + 1, z);
  const std::vector<ThrusterCommand> commands(N, ThrusterCommand{s.initial_alpha, {0.0, 0.0, 0.0}});
  const Eigen::VectorXd x = pack_solution(nlp, boundary, commands);
  EXPECT_LT(nlp.equalities(x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(nlp.inequalities(x).minCoeff(), 0.0);

  // Stage cost reduces to rho / (epsilon + det(T T^T)) with det = 196 at zero angles; the
  // quadrature integrates it over T plus the terminal node weighted by h.
  const double h = s.horizon.interval_length();
  const double expected = (N * h + h) * 1.0 / (1e-3 + 196.0);
  EXPECT_NEAR(nlp.objective(x), expected, 1e-9 * expected);
}

TEST(DockingNlp, ContainmentRowsAreScaledResiduals) {
  const Scenario s = harbor();
  const DockingNlp nlp(s, at_rest(s));
  const Eigen::VectorXd x = nlp.initial_guess();
  const HalfspaceSet h = to_halfspaces(*s.region);
  const auto body = s.safety_polygon().vertices();
  const double r = containment_residuals(h, s.initial_pose, body).minCoeff();
  EXPECT_NEAR(nlp.min_containment_residual(x), r, 1e-9);
  // All states sit at the initial pose, so every containment row is >= r / 100.
  EXPECT_NEAR(nlp.inequalities(x).head(25).minCoeff(), r / 100.0, 1e-12);
}

TEST(StageCost, HeadingErrorIsWrapped) {
  const Scenario s = harbor();
  const VariableScaling scaling = VariableScaling::for_thrusters(s.thrusters);
  const std::vector<double> f = {0.0, 0.0, 0.0};
  Vector6d a, b;
  a << s.desired.x(), s.desired.y(), s.desired.psi() + 0.1, 0, 0, 0;
  b = a;
  b[2] += 2.0 * kPi;
  EXPECT_NEAR(stage_cost(a, f, s.initial_alpha, s.desired, s.weights, s.thrusters, scaling),
              stage_cost(b, f, s.initial_alpha, s.desired, s.weights, s.thrusters, scaling), 1e-12);
  // Only the heading term differs from the equilibrium value: 4 (0.1 / pi)^2.
  Vector6d c = a;
  c[2] = s.desired.psi();
  EXPECT_NEAR(stage_cost(a, f, s.initial_alpha, s.desired, s.weights, s.thrusters, scaling) -
                  stage_cost(c, f, s.initial_alpha, s.desired, s.weights, s.thrusters, scaling),
              4.0 * std::pow(0.1 / kPi, 2), 1e-12);
}

TEST(CollocationAccuracy, VesselIntervalMatchesFineRk4) {
  const VesselParams p = northern_clipper_params();
  const ModelMatrices m = assemble_model(p);
  const auto specs = northern_clipper_thrusters(p.mass_m, p.gravity_g);
  const CollocationGrid g = legendre_grid(3, 10.0);
  const VariableScaling scaling = VariableScaling::for_thrusters(specs);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    ThrusterCommand cmd;
    for (const auto& sp : specs) {
      cmd.f.push_back(sp.f_min + unit(rng) * (sp.f_max - sp.f_min));
      cmd.alpha.push_back(sp.is_azimuth() ? sp.alpha_min + unit(rng) * (sp.alpha_max - sp.alpha_min)
                                          : sp.alpha_fixed);
    }
    const Eigen::Vector3d tau = generalized_force(specs, cmd);
    Vector6d z0;
    z0 << 0, 0, unit(rng), 2 * unit(rng) - 1, 0.5 * unit(rng) - 0.25, 0.01 * (unit(rng) - 0.5);
    const CollocationStep step = solve_collocation_interval(
        g, z0, [&](const Eigen::VectorXd& z) -> Eigen::VectorXd { return dynamics(Vector6d(z), tau, m); },
        [&](const Eigen::VectorXd& z) -> Eigen::MatrixXd { return dynamics_state_jacobian(Vector6d(z), m); });
    ASSERT_TRUE(step.converged);
    Vector6d oracle = z0;
    for (int i = 0; i < 1000; ++i) oracle = rk4_step(oracle, tau, m, 0.01);
    const double err = (Vector6d(step.end_state) - oracle).cwiseQuotient(scaling.state()).norm();
    EXPECT_LE(err, 1e-3) << "trial " << trial;
  }
}

TEST(Trajectory, ExtractAndPackRoundTrip) {
  const Scenario s = harbor();
  const DockingNlp nlp(s, at_rest(s));
  const Eigen::VectorXd x = random_point(nlp, nlp.initial_guess(), 1.0, 17);
  const int N = s.horizon.intervals_N;
  std::vector<Vector6d> boundary;
  std::vector<ThrusterCommand> commands;
  std::vector<std::vector<Vector6d>> colloc(N);
  for (int k = 0; k <= N; ++k) boundary.push_back(nlp.boundary_state(x, k));
  for (int k = 0; k < N; ++k) {
    commands.push_back(nlp.command(x, k));
    for (int j = 1; j <= 3; ++j) colloc[k].push_back(nlp.node_state(x, k, j));
  }
  const Eigen::VectorXd y = pack_solution(nlp, boundary, commands, colloc);
  EXPECT_LT((x - y).cwiseAbs().maxCoeff(), 1e-12);
  const auto traj = extract_trajectory(nlp, x);
  ASSERT_EQ(static_cast<int>(traj.size()), N + 1);
  EXPECT_DOUBLE_EQ(traj[5].t, 5 * s.horizon.interval_length());
}

}  // namespace
}  // namespace shipdock
