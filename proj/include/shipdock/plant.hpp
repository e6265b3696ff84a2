#pragma once

#include <span>
#include <utility>
#include <vector>

#include "shipdock/thrust.hpp"
#include "shipdock/vessel_model.hpp"

namespace shipdock {

// Classical fourth-order Runge-Kutta step of the vessel dynamics with constant tau.
// Throws PreconditionError unless dt is in (0, 1].
Vector6d rk4_step(const Vector6d& state, const Eigen::Vector3d& tau, const ModelMatrices& model,
                  double dt);
std::pair<Pose, Velocity> rk4_step(const Pose& eta, const Velocity& nu, const Eigen::Vector3d& tau,
                                   const ModelMatrices& model, double dt);

struct PlantSample {
  double t = 0.0;
  Vector6d state = Vector6d::Zero();  // heading unwrapped
  std::vector<double> alpha;          // actual thruster angles
  std::vector<double> f;              // applied forces
};

// Angle after slewing for `elapsed` seconds from `from` toward `to` at `rate` rad/s.
double slew_toward(double from, double to, double rate, double elapsed);

// Holds `command` for `duration` seconds. Forces act immediately; azimuth angles move from
// `previous_alpha` toward the commanded angles at their rate limits. The returned trace
// starts at t0 and has one sample per dt substep, the last at t0 + duration.
// Throws PreconditionError if duration is not a positive multiple of dt or the command is
// outside the thruster bounds.
std::vector<PlantSample> simulate_interval(const Vector6d& state, const ThrusterCommand& command,
                                           std::span<const double> previous_alpha,
                                           const ModelMatrices& model,
                                           std::span<const ThrusterSpec> specs, double duration,
                                           double dt = 0.1, double t0 = 0.0);

}  // namespace shipdock
