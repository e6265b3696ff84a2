// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "analytic_problems.hpp"
#include "qp_oracle.hpp"
#include "shipdock/collocation.hpp"
#include "shipdock/derivative_check.hpp"
#include "shipdock/error.hpp"
#include "shipdock/mpc.hpp"
#include "shipdock/plant.hpp"
#include "shipdock/scenario_io.hpp"
#include "shipdock/sqp_solver.hpp"

namespace {

using namespace shipdock;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;
constexpr double kRadToDeg = 180.0 / kPi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

InitialCondition initial_condition(const Scenario& s) {
  InitialCondition ic;
  ic.state << s.initial_pose.vector(), s.initial_velocity.vector();
  ic.alpha = s.initial_alpha;
  return ic;
}

Scenario harbor_slip() { return load_scenario(resolve_scenario_path("harbor-slip")); }

Outcome model_assembly() {
  const ModelMatrices m = assemble_model(northern_clipper_params());
  const double em = std::abs(m.M(0, 0) - 6.7644e6) / 6.7644e6;
  const double ed = std::abs(m.D(0, 0) - 7.7032e4) / 7.7032e4;
  return {em <= 1e-3 && ed <= 1e-3,
          fmt("M00 = %.6g (rel err %.2e), D00 = %.6g (rel err %.2e)", m.M(0, 0), em, m.D(0, 0), ed)};
}

Outcome thrust_math() {
  const VesselParams p = northern_clipper_params();
  const auto specs = northern_clipper_thrusters(p.mass_m, p.gravity_g);
  const std::vector<double> zero = {0.0, 0.0, kPi / 2.0};
  const ConfigMatrix T = config_matrix(specs, zero);
  Eigen::Matrix3d expected;
  expected << 1, 1, 0, 0, 0, 1, -7, 7, 35;
  // The tunnel column holds cos(pi/2), so allow one ulp-scale entry.
  const double entry_error = (T - expected).cwiseAbs().maxCoeff();
  const double det = (T * T.transpose()).determinant();
  AllocationWeights w;
  const std::vector<double> aligned = {kPi / 2.0, kPi / 2.0, kPi / 2.0};
  const double cost = singularity_cost(specs, aligned, w);
  const bool pass = entry_error <= 1e-16 && std::abs(det - 196.0) <= 1e-9 && cost == w.rho / w.epsilon;
  return {pass, fmt("max |T - T_ref| = %.1e, det(T T^T) = %.12g, aligned cost = %.17g (rho/eps = %.17g)",
                    entry_error, det, cost, w.rho / w.epsilon)};
}

Outcome derivative_gate() {
  const Scenario s = harbor_slip();
  const DockingNlp nlp(s, initial_condition(s));
  const auto start = Clock::now();
  double worst = 0.0;
  std::string where;
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = random_point(nlp, nlp.initial_guess(), 2.0, 1000 + i);
    const DerivativeReport r = derivative_check(nlp, x);
    if (r.max_relative_error() > worst) {
      worst = r.max_relative_error();
      where = r.worst.block;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-6 && elapsed <= 60.0,
          fmt("100 points, worst relative error %.2e (%s), %.1f s", worst, where.c_str(), elapsed)};
}

Outcome collocation_accuracy() {
  const CollocationGrid unit = legendre_grid(3, 1.0);
  const CollocationStep decay = solve_collocation_interval(
      unit, Eigen::VectorXd::Ones(1), [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; },
      [](const Eigen::VectorXd&) -> Eigen::MatrixXd { return -Eigen::MatrixXd::Identity(1, 1); });
  const double decay_error = std::abs(decay.end_state[0] - std::exp(-1.0));

  const VesselParams p = northern_clipper_params();
  const ModelMatrices m = assemble_model(p);
  const auto specs = northern_clipper_thrusters(p.mass_m, p.gravity_g);
  const VariableScaling scaling = VariableScaling::for_thrusters(specs);
  const CollocationGrid g = legendre_grid(3, 10.0);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  double worst = 0.0;
  bool converged = decay.converged;
  for (int trial = 0; trial < 10; ++trial) {
    ThrusterCommand cmd;
    for (const auto& sp : specs) {
      cmd.f.push_back(sp.f_min + unit01(rng) * (sp.f_max - sp.f_min));
      cmd.alpha.push_back(sp.is_azimuth() ? sp.alpha_min + unit01(rng) * (sp.alpha_max - sp.alpha_min)
                                          : sp.alpha_fixed);
    }
    const Eigen::Vector3d tau = generalized_force(specs, cmd);
    Vector6d z0;
    z0 << 0, 0, 2 * kPi * unit01(rng), 2 * unit01(rng) - 1, 0.5 * unit01(rng) - 0.25, 0.02 * (unit01(rng) - 0.5);
    const CollocationStep step = solve_collocation_interval(
        g, z0, [&](const Eigen::VectorXd& z) -> Eigen::VectorXd { return dynamics(Vector6d(z), tau, m); },
        [&](const Eigen::VectorXd& z) -> Eigen::MatrixXd { return dynamics_state_jacobian(Vector6d(z), m); });
    converged = converged && step.converged;
    Vector6d oracle = z0;
    for (int i = 0; i < 1000; ++i) oracle = rk4_step(oracle, tau, m, 0.01);
    worst = std::max(worst, (Vector6d(step.end_state) - oracle).cwiseQuotient(scaling.state()).norm());
  }
  return {converged && decay_error <= 1e-4 && worst <= 1e-3,
          fmt("|x(1) - e^-1| = %.2e, vessel interval vs RK4(0.01) worst scaled error %.2e", decay_error, worst)};
}

Outcome solver_regression() {
  int solved = 0;
  double worst_kkt = 0.0;
  std::string failed;
  const auto problems = shipdock::testing::analytic_problems();
  for (const auto& p : problems) {
    const SolveResult r = solve(p.nlp);
    const bool ok = r.status == SolveStatus::kConverged && r.stats.kkt_residual <= 1e-6 &&
                    std::abs(r.objective - p.optimal_value) <= 1e-6 * std::max(1.0, std::abs(p.optimal_value));
    solved += ok ? 1 : 0;
    if (!ok) failed += " " + p.name;
    worst_kkt = std::max(worst_kkt, r.stats.kkt_residual);
  }

  std::mt19937 rng(99);
  int qp_total = 0;
  int qp_matched = 0;
  double qp_worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 10;
    const int m = 1 + (trial / 10) % 8;
    const auto qp = shipdock::testing::random_qp(n, m, rng);
    const auto oracle = shipdock::testing::brute_force_qp(qp);
    if (!oracle) continue;
    ++qp_total;
    const QpSolution s = solve_qp(shipdock::testing::to_problem(qp));
    const double err = s.status == QpStatus::kSolved ? (s.x - *oracle).cwiseAbs().maxCoeff() : 1e300;
    qp_worst = std::max(qp_worst, err);
    qp_matched += err <= 1e-8 ? 1 : 0;
  }
  const bool pass = solved == static_cast<int>(problems.size()) && problems.size() >= 10 &&
                    qp_matched == qp_total && qp_total > 0;
  return {pass, fmt("%d/%zu analytic problems (worst KKT %.1e)%s; %d/%d random QPs within 1e-8 (worst %.1e)",
                    solved, problems.size(), worst_kkt, failed.empty() ? "" : (" failed:" + failed).c_str(),
                    qp_matched, qp_total, qp_worst)};
}

struct ClosedLoopOutcomes {
  Outcome docking;
  Outcome heading_follows_course;
};

ClosedLoopOutcomes closed_loop_docking() {
  const Scenario s = harbor_slip();
  MpcConfig config;
  config.stop_when_docked = false;  // judge the state at the end of the full 600 s
  const auto start = Clock::now();
  const ClosedLoopLog log = run_closed_loop(s, 600.0, config);
  const double elapsed = seconds_since(start);

  const Vector6d& z = log.samples.back().sample.state;
  const double pos = std::hypot(z[0] - s.desired.x(), z[1] - s.desired.y());
  const double head = std::abs(wrap_angle(z[2] - s.desired.psi())) * kRadToDeg;
  const double speed = std::hypot(z[3], z[4]);
  double min_residual = std::numeric_limits<double>::infinity();
  for (const auto& sample : log.samples) min_residual = std::min(min_residual, sample.min_spatial_residual);

  bool commands_ok = true;
  std::vector<double> previous = s.initial_alpha;
  const double slack = 1e-9;
  int degraded = 0;
  for (const auto& r : log.replans) {
    degraded += r.degraded ? 1 : 0;
    try {
      validate_command(s.thrusters, r.command);
    } catch (const Error&) {
      commands_ok = false;
    }
    for (std::size_t i = 0; i < s.thrusters.size(); ++i) {
      if (!s.thrusters[i].is_azimuth()) continue;
      const double reach = s.thrusters[i].alpha_rate_max * s.horizon.interval_length();
      if (std::abs(r.command.alpha[i] - previous[i]) > reach + slack) commands_ok = false;
    }
    previous = r.command.alpha;
  }
  // The plant's own angles move at the rate limit between samples.
  for (std::size_t k = 1; k < log.samples.size(); ++k) {
    const auto& a = log.samples[k].sample.alpha;
    const auto& b = log.samples[k - 1].sample.alpha;
    for (std::size_t i = 0; i < s.thrusters.size(); ++i) {
      if (std::abs(a[i] - b[i]) > s.thrusters[i].alpha_rate_max * config.plant_dt + slack) commands_ok = false;
    }
  }

  ClosedLoopOutcomes out;
  const bool docked = pos <= 1.0 && head <= 2.0 && speed <= 0.05;
  out.docking = {docked && min_residual >= -1e-3 && commands_ok,
                 fmt("final error %.3f m, %.3f deg, %.4f m/s; min residual %.3f m; commands %s; "
                     "%zu replans (%d degraded), docked flag %d at %.0f s; %.0f s wall",
                     pos, head, speed, min_residual, commands_ok ? "within limits" : "VIOLATE limits",
                     log.replans.size(), degraded, log.docked ? 1 : 0, log.docked_time, elapsed)};

  // Heading versus course over ground: the course is psi + atan2(v, u).
  double sum = 0.0;
  int count = 0;
  for (const auto& sample : log.samples) {
    const Vector6d& x = sample.sample.state;
    if (std::hypot(x[3], x[4]) <= 0.5) continue;
    sum += std::abs(std::atan2(x[4], x[3]));
    ++count;
  }
  const double mean = count > 0 ? sum / count * kRadToDeg : 0.0;
  out.heading_follows_course = {count > 0 && mean <= 30.0,
                                fmt("mean |psi - course| = %.2f deg over %d samples above 0.5 m/s", mean, count)};
  return out;
}

Outcome warm_start_benefit() {
  const Scenario s = harbor_slip();
  const DockingNlp first(s, initial_condition(s));
  const SolveResult r0 = solve(first);
  if (r0.status != SolveStatus::kConverged) return {false, "initial solve did not converge"};

  // Next replanning problem after one interval of nominal motion: it starts from the predicted
  // second boundary state with the first planned angles.
  const DockingNlp next(s, InitialCondition{first.boundary_state(r0.x, 1), first.command(r0.x, 0).alpha});

  const SolveResult cold = solve(next);
  const SolveResult warm = solve(next, {}, shift_warm_start(next, r0));
  if (cold.status != SolveStatus::kConverged || warm.status != SolveStatus::kConverged) {
    return {false, fmt("cold %s, warm %s", to_string(cold.status), to_string(warm.status))};
  }
  const double iter_ratio = static_cast<double>(warm.stats.iterations) / cold.stats.iterations;
  const double time_ratio = warm.stats.wall_time_s / cold.stats.wall_time_s;
  return {iter_ratio <= 1.0 / 3.0 && time_ratio <= 0.5,
          fmt("iterations warm %d / cold %d = %.2f (limit 0.33); time %.2f s / %.2f s = %.2f (limit 0.5)",
              warm.stats.iterations, cold.stats.iterations, iter_ratio, warm.stats.wall_time_s,
              cold.stats.wall_time_s, time_ratio)};
}

Outcome station_keeping() {
  Scenario s = harbor_slip();
  s.initial_pose = s.desired;
  s.initial_velocity = {};
  MpcConfig config;
  config.stop_when_docked = false;
  const ClosedLoopLog log = run_closed_loop(s, 100.0, config);
  // Converged station keeping: the second half of the run.
  double min_det = std::numeric_limits<double>::infinity();
  for (std::size_t k = log.replans.size() / 2; k < log.replans.size(); ++k) {
    min_det = std::min(min_det, manoeuvrability_determinant(s.thrusters, log.replans[k].command.alpha,
                                                             s.weights.allocation));
  }
  double max_drift = 0.0;
  for (const auto& sample : log.samples) {
    const Vector6d& z = sample.sample.state;
    max_drift = std::max(max_drift, std::hypot(z[0] - s.desired.x(), z[1] - s.desired.y()));
  }
  const auto& alpha = log.replans.back().command.alpha;
  return {min_det >= 1.0, fmt("min det(T W^-1 T^T) = %.4g over the last %zu replans (final angles %.1f, %.1f deg); "
                              "max drift %.3f m",
                              min_det, log.replans.size() - log.replans.size() / 2, alpha[0] * kRadToDeg,
                              alpha[1] * kRadToDeg, max_drift)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome outcome;
  };
  std::vector<Criterion> results;
  auto run = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    results.push_back({id, name, o});
  };

  run(1, "model assembly", model_assembly);
  run(2, "thrust math", thrust_math);
  run(3, "derivative gate", derivative_gate);
  run(4, "collocation accuracy", collocation_accuracy);
  run(5, "solver regression", solver_regression);
  ClosedLoopOutcomes closed;
  try {
    closed = closed_loop_docking();
  } catch (const std::exception& e) {
    closed.docking = {false, std::string("exception: ") + e.what()};
    closed.heading_follows_course = closed.docking;
  }
  run(6, "closed-loop docking (harbor-slip, 600 s)", [&] { return closed.docking; });
  run(7, "warm-start benefit", warm_start_benefit);
  run(8, "bow follows course during approach", [&] { return closed.heading_follows_course; });
  run(9, "station-keeping manoeuvrability", station_keeping);

  int failed = 0;
  for (const auto& r : results) failed += r.outcome.pass ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
