#include "shipdock/plant.hpp"

#include <cmath>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

void check_dt(double dt) {
  if (!(dt > 0.0 && dt <= 1.0)) throw PreconditionError("plant step must lie in (0, 1] s");
}

Eigen::Vector3d thrust(std::span<const ThrusterSpec> specs, std::span<const double> alpha,
                       std::span<const double> f) {
  Eigen::Vector3d tau = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double a = specs[i].is_azimuth() ? alpha[i] : specs[i].alpha_fixed;
    tau += config_column(specs[i], a) * f[i];
  }
  return tau;
}

}  // namespace

Vector6d rk4_step(const Vector6d& state, const Eigen::Vector3d& tau, const ModelMatrices& model,
                  double dt) {
  check_dt(dt);
  const Vector6d k1 = dynamics(state, tau, model);
  const Vector6d k2 = dynamics(state + 0.5 * dt * k1, tau, model);
  const Vector6d k3 = dynamics(state + 0.5 * dt * k2, tau, model);
  const Vector6d k4 = dynamics(state + dt * k3, tau, model);
  return state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::pair<Pose, Velocity> rk4_step(const Pose& eta, const Velocity& nu, const Eigen::Vector3d& tau,
                                   const ModelMatrices& model, double dt) {
  Vector6d s;
  s << eta.vector(), nu.vector();
  const Vector6d next = rk4_step(s, tau, model, dt);
  return {Pose(next[0], next[1], next[2]), Velocity{next[3], next[4], next[5]}};
}

double slew_toward(double from, double to, double rate, double elapsed) {
  const double reach = rate * elapsed;
  const double delta = to - from;
  if (std::abs(delta) <= reach) return to;
  return from + std::copysign(reach, delta);
}

std::vector<PlantSample> simulate_interval(const Vector6d& state, const ThrusterCommand& command,
                                           std::span<const double> previous_alpha,
                                           const ModelMatrices& model,
                                           std::span<const ThrusterSpec> specs, double duration,
                                           double dt, double t0) {
  check_dt(dt);
  const std::size_t n = specs.size();
  if (previous_alpha.size() != n) throw DimensionMismatch("previous angles: one per thruster");
  validate_command(specs, command);
  const double ratio = duration / dt;
  const long steps = std::lround(ratio);
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio) {
    throw PreconditionError("duration must be a positive multiple of the plant step");
  }

  auto alpha_at = [&](double elapsed) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = specs[i].is_azimuth()
                 ? slew_toward(previous_alpha[i], command.alpha[i], specs[i].alpha_rate_max, elapsed)
                 : specs[i].alpha_fixed;
    }
    return a;
  };
  auto rhs = [&](const Vector6d& z, double elapsed) {
    return dynamics(z, thrust(specs, alpha_at(elapsed), command.f), model);
  };

  std::vector<PlantSample> trace;
  trace.reserve(steps + 1);
  Vector6d z = state;
  trace.push_back({t0, z, alpha_at(0.0), command.f});
  for (long i = 0; i < steps; ++i) {
    // Stage times follow the slewing angles, so a slew that ends mid-step is integrated
    // with the angle it actually has at each stage.
    const double s = duration * static_cast<double>(i) / static_cast<double>(steps);
    const Vector6d k1 = rhs(z, s);
    const Vector6d k2 = rhs(z + 0.5 * dt * k1, s + 0.5 * dt);
    const Vector6d k3 = rhs(z + 0.5 * dt * k2, s + 0.5 * dt);
    const Vector6d k4 = rhs(z + dt * k3, s + dt);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double elapsed = duration * static_cast<double>(i + 1) / static_cast<double>(steps);
    trace.push_back({t0 + elapsed, z, alpha_at(elapsed), command.f});
  }
  return trace;
}

}  // namespace shipdock
