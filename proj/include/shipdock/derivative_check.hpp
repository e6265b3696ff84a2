#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "shipdock/nlp.hpp"

namespace shipdock {

// One compared derivative entry.
struct DerivativeEntry {
  std::string block;  // "gradient", "equality_jacobian", "inequality_jacobian" or "hessian"
  int row = -1;
  int col = -1;
  double analytic = 0.0;
  double finite_difference = 0.0;
  double relative_error = 0.0;  // |analytic - fd| / max(1, |analytic|, |fd|)
};

struct DerivativeReport {
  DerivativeEntry worst;
  long entries_checked = 0;
  double max_relative_error() const { return worst.relative_error; }
  std::string describe() const;
};

// Central-difference formulas: (g(x+h) - g(x-h)) / 2h, or the fourth-order five-point rule
// (8 (g(x+h) - g(x-h)) - (g(x+2h) - g(x-2h))) / 12h. The singularity cost varies on a scale
// of about sqrt(epsilon) near rank-deficient azimuth angles, where even the fourth-order rule's
// truncation error exceeds 1e-6; columns where the two rules disagree by more than 1e-6 are
// recomputed with Ridders' extrapolation.
enum class Stencil { kThreePoint, kFivePoint };

// Compares the objective gradient and both constraint Jacobians with central differences of
// step `perturbation` in every coordinate.
DerivativeReport derivative_check(const Nlp& nlp, const Eigen::VectorXd& x,
                                  double perturbation = 1e-5, Stencil stencil = Stencil::kFivePoint);

// Compares the Lagrangian Hessian with central differences of the Lagrangian gradient. Only
// meaningful for evaluators that return the exact Hessian.
DerivativeReport hessian_check(const Nlp& nlp, const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                               const Eigen::VectorXd& z_in, double perturbation = 1e-5,
                               Stencil stencil = Stencil::kFivePoint);

// Point drawn uniformly in the box [lower, upper], with infinite sides replaced by
// [center - spread, center + spread] around `center`.
Eigen::VectorXd random_point(const Nlp& nlp, const Eigen::VectorXd& center, double spread,
                             std::uint64_t seed);

}  // namespace shipdock
