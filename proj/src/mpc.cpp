#include "shipdock/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shipdock/error.hpp"
#include "shipdock/plant.hpp"

namespace shipdock {
namespace {

// Row offsets of the inequality blocks: interval k starts at offsets[k], the final boundary
// rows at offsets[N].
std::vector<int> inequality_offsets(const DockingNlp& nlp) {
  const DecisionLayout& L = nlp.layout();
  const int rows = nlp.containment_rows_per_point();
  std::vector<int> offsets(L.intervals() + 1, 0);
  int row = 0;
  for (int k = 0; k < L.intervals(); ++k) {
    offsets[k] = row;
    row += (k == 0 ? L.degree() : L.degree() + 1) * rows + 2 * L.num_azimuths();
  }
  offsets[L.intervals()] = row;
  return offsets;
}

// Shifts the per-variable vector v (decision vector or bound multipliers).
Eigen::VectorXd shift_variables(const DecisionLayout& L, const Eigen::VectorXd& v, bool hold_state) {
  const int N = L.intervals();
  const int stride = L.interval_stride();
  Eigen::VectorXd out = v;
  if (N > 1) out.head((N - 1) * stride) = v.segment(stride, (N - 1) * stride);
  const int last = (N - 1) * stride;
  const Eigen::VectorXd final_state = v.segment<6>(L.boundary(N));
  for (int j = 0; j <= L.degree(); ++j) {
    out.segment<6>(last + 6 * j) = hold_state ? final_state : Eigen::VectorXd::Zero(6);
  }
  out.segment(L.force(N - 1), L.num_thrusters() + L.num_azimuths()) =
      v.segment(L.force(N - 1), L.num_thrusters() + L.num_azimuths());
  return out;
}

double clamp_command_alpha(double alpha, const ThrusterSpec& s, double current, double h) {
  const double reach = s.alpha_rate_max * h;
  const double lo = std::max(s.alpha_min, current - reach);
  const double hi = std::min(s.alpha_max, current + reach);
  return lo <= hi ? std::clamp(alpha, lo, hi) : std::clamp(current, s.alpha_min, s.alpha_max);
}

double min_residual(const std::optional<HalfspaceSet>& region, const std::vector<Point2>& points,
                    const Vector6d& z) {
  if (!region) return std::numeric_limits<double>::infinity();
  return containment_residuals(*region, Pose(z[0], z[1], z[2]), points).minCoeff();
}

}  // namespace

bool DockingTolerance::satisfied(const Vector6d& state, const Pose& desired) const {
  const double dist = std::hypot(state[0] - desired.x(), state[1] - desired.y());
  const double heading_error = std::abs(wrap_angle(state[2] - desired.psi()));
  const double speed = std::hypot(state[3], state[4]);
  return dist <= position && heading_error <= heading && speed <= this->speed;
}

PlanResult plan(const VesselState& current, const Scenario& scenario, const MpcConfig& config,
                const std::optional<WarmStart>& warm) {
  InitialCondition ic{current.state, current.command.alpha};
  const DockingNlp nlp(scenario, ic, config.transcription);
  PlanResult out;
  out.solve = solve(nlp, config.solver, warm);
  if (out.solve.status != SolveStatus::kConverged) {
    out.degraded = true;
    out.command = current.command;
    return out;
  }
  out.predicted = extract_trajectory(nlp, out.solve.x);
  ThrusterCommand cmd = nlp.command(out.solve.x, 0);
  const double h = nlp.grid().h;
  for (std::size_t i = 0; i < scenario.thrusters.size(); ++i) {
    const ThrusterSpec& s = scenario.thrusters[i];
    cmd.f[i] = std::clamp(cmd.f[i], s.f_min, s.f_max);
    if (s.is_azimuth()) cmd.alpha[i] = clamp_command_alpha(cmd.alpha[i], s, current.command.alpha[i], h);
  }
  out.command = std::move(cmd);
  return out;
}

WarmStart shift_warm_start(const DockingNlp& nlp, const SolveResult& previous) {
  const DecisionLayout& L = nlp.layout();
  const int N = L.intervals();
  const int d = L.degree();
  if (previous.x.size() != L.dimension() ||
      previous.multipliers.y_eq.size() != nlp.num_equalities() ||
      previous.multipliers.z_in.size() != nlp.num_inequalities()) {
    throw DimensionMismatch("shift_warm_start: previous solution does not match the layout");
  }
  WarmStart w;
  w.x = shift_variables(L, previous.x, true);
  {
    // The appended interval repeats the last controls; its states follow the model from the
    // old final state so that the defects start small.
    const ModelMatrices model = assemble_model(nlp.scenario().vessel);
    const Eigen::Vector3d tau = generalized_force(nlp.scenario().thrusters, nlp.command(w.x, N - 1));
    const Vector6d scale = nlp.scaling().state();
    const double h = nlp.grid().h;
    Vector6d z = nlp.boundary_state(previous.x, N);
    double t = 0.0;
    auto advance = [&](double t_end) {
      const int steps = std::max(1, static_cast<int>(std::ceil((t_end - t) / 0.5 - 1e-9)));
      const double dt = (t_end - t) / steps;
      for (int i = 0; i < steps && dt > 0.0; ++i) z = rk4_step(z, tau, model, dt);
      t = t_end;
    };
    for (int j = 1; j <= d; ++j) {
      advance(nlp.grid().tau_points[j - 1] * h);
      w.x.segment<6>(L.collocation(N - 1, j)) = z.cwiseQuotient(scale);
    }
    advance(h);
    w.x.segment<6>(L.boundary(N)) = z.cwiseQuotient(scale);
  }
  w.multipliers.z_lower = shift_variables(L, previous.multipliers.z_lower, false);
  w.multipliers.z_upper = shift_variables(L, previous.multipliers.z_upper, false);

  // Equalities: [initial 6 | interval blocks of 6 (d + 1)].
  const Eigen::VectorXd& y = previous.multipliers.y_eq;
  const int block = 6 * (d + 1);
  Eigen::VectorXd y_new = y;
  // The old continuity row of interval 0 pins z_1 with coefficient -1; the new initial row
  // pins the same state with +1.
  y_new.head<6>() = -y.segment<6>(6 + block - 6);
  if (N > 1) y_new.segment(6, (N - 1) * block) = y.segment(6 + block, (N - 1) * block);
  w.multipliers.y_eq = y_new;

  // Inequalities: interval 0 has no boundary rows, the others do.
  const Eigen::VectorXd& z = previous.multipliers.z_in;
  const int rows = nlp.containment_rows_per_point();
  const int slew = 2 * L.num_azimuths();
  const std::vector<int> off = inequality_offsets(nlp);
  Eigen::VectorXd z_new = Eigen::VectorXd::Zero(z.size());
  if (N > 1) {
    z_new.segment(off[0], d * rows + slew) = z.segment(off[1] + rows, d * rows + slew);
    for (int k = 1; k < N - 1; ++k) {
      z_new.segment(off[k], (d + 1) * rows + slew) = z.segment(off[k + 1], (d + 1) * rows + slew);
    }
    for (int j = 0; j <= d; ++j) z_new.segment(off[N - 1] + j * rows, rows) = z.segment(off[N], rows);
  }
  z_new.segment(off[N], rows) = z.segment(off[N], rows);
  w.multipliers.z_in = z_new;
  return w;
}

ClosedLoopLog run_closed_loop(const Scenario& scenario, double duration, const MpcConfig& config) {
  const double h = scenario.horizon.interval_length();
  const double periods_exact = duration / h;
  const long periods = std::lround(periods_exact);
  if (duration < 0.0 || std::abs(periods_exact - static_cast<double>(periods)) > 1e-9 * (1.0 + periods_exact)) {
    throw PreconditionError("duration must be a nonnegative multiple of the interval length");
  }
  ClosedLoopLog log;
  if (periods == 0) return log;

  const ModelMatrices model = assemble_model(scenario.vessel);
  std::optional<HalfspaceSet> region;
  std::vector<Point2> points;
  if (scenario.region) {
    region = to_halfspaces(*scenario.region);
    points = scenario.safety_polygon().vertices();
  }

  VesselState cur;
  cur.state << scenario.initial_pose.vector(), scenario.initial_velocity.vector();
  cur.command.alpha = scenario.initial_alpha;
  cur.command.f.assign(scenario.thrusters.size(), 0.0);
  for (std::size_t i = 0; i < scenario.thrusters.size(); ++i) {
    if (!scenario.thrusters[i].is_azimuth()) cur.command.alpha[i] = scenario.thrusters[i].alpha_fixed;
  }
  const DockingNlp shape(scenario, InitialCondition{cur.state, cur.command.alpha}, config.transcription);

  log.samples.push_back({{0.0, cur.state, cur.command.alpha, cur.command.f},
                         min_residual(region, points, cur.state)});
  std::optional<WarmStart> warm;
  int consecutive = 0;
  auto check_docked = [&](double t) {
    consecutive = config.tolerance.satisfied(cur.state, scenario.desired) ? consecutive + 1 : 0;
    if (consecutive >= config.success_replans && !log.docked) {
      log.docked = true;
      log.docked_time = t;
    }
    return log.docked && config.stop_when_docked;
  };

  for (long p = 0; p < periods; ++p) {
    const double t = h * static_cast<double>(p);
    if (check_docked(t)) return log;
    PlanResult pr = plan(cur, scenario, config, warm);
    ReplanRecord rec;
    rec.t = t;
    rec.status = pr.solve.status;
    rec.stats = pr.solve.stats;
    rec.degraded = pr.degraded;
    rec.warm = warm.has_value();
    rec.command = pr.command;
    rec.predicted = std::move(pr.predicted);
    log.replans.push_back(std::move(rec));
    warm.reset();
    if (!pr.degraded) warm = shift_warm_start(shape, pr.solve);

    const std::vector<PlantSample> trace = simulate_interval(
        cur.state, pr.command, cur.command.alpha, model, scenario.thrusters, h, config.plant_dt, t);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      log.samples.push_back({trace[i], min_residual(region, points, trace[i].state)});
    }
    cur.state = trace.back().state;
    cur.command.alpha = trace.back().alpha;
    cur.command.f = pr.command.f;
  }
  check_docked(h * static_cast<double>(periods));
  return log;
}

}  // namespace shipdock
