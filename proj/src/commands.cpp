#include "shipdock/commands.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include "shipdock/csv_io.hpp"
#include "shipdock/derivative_check.hpp"
#include "shipdock/error.hpp"
#include "shipdock/mpc.hpp"
#include "shipdock/ocp.hpp"
#include "shipdock/scenario_io.hpp"
#include "shipdock/sqp_solver.hpp"
#include "shipdock/svg_plot.hpp"

namespace shipdock {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDerivativeGate = 1e-5;
constexpr int kDerivativePoints = 10;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

int count_azimuths(const Scenario& scenario) { return scenario.num_azimuths(); }

InitialCondition initial_condition(const Scenario& scenario) {
  InitialCondition ic;
  ic.state << scenario.initial_pose.vector(), scenario.initial_velocity.vector();
  ic.alpha = scenario.initial_alpha;
  for (std::size_t i = 0; i < scenario.thrusters.size(); ++i) {
    if (!scenario.thrusters[i].is_azimuth()) ic.alpha[i] = scenario.thrusters[i].alpha_fixed;
  }
  return ic;
}

void print_pose_error(std::ostream& out, const Vector6d& z, const Pose& desired) {
  out << "position_error_m " << std::hypot(z[0] - desired.x(), z[1] - desired.y()) << '\n'
      << "heading_error_deg " << std::abs(wrap_angle(z[2] - desired.psi())) * kRadToDeg << '\n'
      << "speed_m_s " << std::hypot(z[3], z[4]) << '\n';
}

double min_residual(const std::vector<TrajectoryRow>& rows) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) r = std::min(r, row.min_spatial_residual);
  return r;
}

}  // namespace

Scenario load_command_scenario(const CommandOptions& options) {
  if (options.scenario.empty()) throw ValidationError("--scenario", "a scenario is required");
  Scenario scenario = load_scenario(resolve_scenario_path(options.scenario));
  if (options.horizon) {
    if (!(*options.horizon > 0.0) || !std::isfinite(*options.horizon)) {
      throw ValidationError("--horizon", "must be a positive number of seconds");
    }
    scenario.horizon.horizon_T = *options.horizon;
  }
  if (options.intervals) {
    if (*options.intervals < 1) throw ValidationError("--intervals", "must be at least 1");
    scenario.horizon.intervals_N = *options.intervals;
  }
  return scenario;
}

int cmd_solve(const CommandOptions& options, std::ostream& out) {
  const Scenario scenario = load_command_scenario(options);
  std::filesystem::create_directories(options.out);
  const DockingNlp nlp(scenario, initial_condition(scenario));
  for (const auto& w : nlp.warnings()) out << "warning: " << w << '\n';

  SolverSettings settings;
  settings.verbose = options.verbose;
  const SolveResult result = solve(nlp, settings);
  const std::vector<TrajectoryRow> rows = trajectory_rows(nlp, result.x);

  {
    std::ofstream csv = open_output(options.out / "trajectory.csv");
    write_trajectory_csv(csv, rows, static_cast<int>(scenario.thrusters.size()), count_azimuths(scenario));
  }
  {
    std::ofstream stats = open_output(options.out / "solve_stats.txt");
    stats.precision(10);
    stats << "scenario " << scenario.name << '\n'
          << "status " << to_string(result.status) << '\n'
          << "objective " << result.objective << '\n'
          << "iterations " << result.stats.iterations << '\n'
          << "qp_iterations " << result.stats.qp_iterations << '\n'
          << "elastic_steps " << result.stats.elastic_steps << '\n'
          << "kkt_residual " << result.stats.kkt_residual << '\n'
          << "wall_time_s " << result.stats.wall_time_s << '\n'
          << "variables " << nlp.num_variables() << '\n'
          << "equalities " << nlp.num_equalities() << '\n'
          << "inequalities " << nlp.num_inequalities() << '\n'
          << "min_spatial_residual_m " << min_residual(rows) << '\n';
    print_pose_error(stats, nlp.boundary_state(result.x, scenario.horizon.intervals_N), scenario.desired);
  }
  write_plots(options.out, scenario, rows);

  out << scenario.name << ": " << to_string(result.status) << " after " << result.stats.iterations
      << " iterations, objective " << result.objective << ", KKT residual " << result.stats.kkt_residual
      << '\n';
  out << "wrote " << (options.out / "trajectory.csv").string() << ", solve_stats.txt and 4 plots\n";
  return result.status == SolveStatus::kConverged ? kExitOk : kExitSolverFailure;
}

int cmd_simulate(const CommandOptions& options, std::ostream& out) {
  const Scenario scenario = load_command_scenario(options);
  const double duration = options.duration.value_or(600.0);
  std::filesystem::create_directories(options.out);

  MpcConfig config;
  config.solver.verbose = options.verbose;
  const ClosedLoopLog log = run_closed_loop(scenario, duration, config);
  const std::vector<TrajectoryRow> rows = trajectory_rows(log, scenario);
  {
    std::ofstream csv = open_output(options.out / "trajectory.csv");
    write_trajectory_csv(csv, rows, static_cast<int>(scenario.thrusters.size()), count_azimuths(scenario));
  }
  {
    std::ofstream csv = open_output(options.out / "replans.csv");
    write_replan_csv(csv, log.replans, scenario.thrusters);
  }
  int degraded = 0;
  for (const auto& r : log.replans) degraded += r.degraded ? 1 : 0;
  {
    std::ofstream summary = open_output(options.out / "summary.txt");
    summary.precision(10);
    summary << "scenario " << scenario.name << '\n'
            << "duration_s " << duration << '\n'
            << "docked " << (log.docked ? 1 : 0) << '\n'
            << "docked_time_s " << log.docked_time << '\n'
            << "replans " << log.replans.size() << '\n'
            << "degraded_replans " << degraded << '\n'
            << "min_spatial_residual_m " << min_residual(rows) << '\n';
    if (!log.samples.empty()) print_pose_error(summary, log.samples.back().sample.state, scenario.desired);
  }
  write_plots(options.out, scenario, rows);

  out << scenario.name << ": " << (log.docked ? "docked" : "not docked");
  if (log.docked) out << " at t = " << log.docked_time << " s";
  out << " (" << log.replans.size() << " replans, " << degraded << " degraded)\n";
  if (!log.samples.empty()) print_pose_error(out, log.samples.back().sample.state, scenario.desired);
  return log.docked ? kExitOk : kExitNotDocked;
}

int cmd_check_derivatives(const CommandOptions& options, std::ostream& out) {
  const Scenario scenario = load_command_scenario(options);
  const DockingNlp nlp(scenario, initial_condition(scenario));
  const Eigen::VectorXd center = nlp.initial_guess();
  DerivativeReport worst;
  for (int i = 0; i < kDerivativePoints; ++i) {
    const Eigen::VectorXd x = random_point(nlp, center, 2.0, options.seed + static_cast<std::uint64_t>(i));
    const DerivativeReport report = derivative_check(nlp, x);
    if (options.verbose) out << "point " << i << ": " << report.describe() << '\n';
    if (i == 0 || report.max_relative_error() > worst.max_relative_error()) worst = report;
  }
  const bool pass = worst.max_relative_error() <= kDerivativeGate;
  out << (pass ? "PASS " : "FAIL ") << kDerivativePoints << " points, worst " << worst.describe() << '\n';
  return pass ? kExitOk : kExitDerivativeFailure;
}

int cmd_plot(const CommandOptions& options, std::ostream& out) {
  const Scenario scenario = load_command_scenario(options);
  const std::filesystem::path source = options.trajectory.value_or(options.out / "trajectory.csv");
  std::ifstream in(source);
  if (!in) throw ValidationError("--trajectory", "cannot read " + source.string());
  const std::vector<TrajectoryRow> rows = read_trajectory_csv(in);
  if (!rows.empty() && (rows.front().f.size() != scenario.thrusters.size() ||
                        static_cast<int>(rows.front().alpha.size()) != scenario.num_azimuths())) {
    throw ValidationError("--trajectory", "thruster columns do not match the scenario");
  }
  const auto written = write_plots(options.out, scenario, rows);
  for (const auto& path : written) out << "wrote " << path.string() << '\n';
  return kExitOk;
}

int run_command(int (*command)(const CommandOptions&, std::ostream&), const CommandOptions& options,
                std::ostream& out, std::ostream& err) {
  try {
    return command(options, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DegenerateInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
}

}  // namespace shipdock
