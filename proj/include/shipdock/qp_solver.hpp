#pragma once

#include <Eigen/Core>

#include "shipdock/nlp.hpp"

namespace shipdock {

// Convex QP
//   min 1/2 x^T H x + g^T x  s.t.  A_eq x = b_eq,  A_in x >= b_in,  lower <= x <= upper.
// Bounds may hold +-infinity; empty bound vectors mean unbounded.
struct QpProblem {
  SparseMatrix H;  // full symmetric storage
  Eigen::VectorXd g;
  SparseMatrix A_eq;
  Eigen::VectorXd b_eq;
  SparseMatrix A_in;
  Eigen::VectorXd b_in;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int num_variables() const { return static_cast<int>(g.size()); }
};

struct QpSettings {
  double tolerance = 1e-10;
  int max_iterations = 200;
  double primal_regularization = 1e-10;
  double dual_regularization = 1e-10;
  int refinement_steps = 4;
};

enum class QpStatus { kSolved, kInfeasible, kMaxIterations, kNumericalFailure };

const char* to_string(QpStatus status);

// Multipliers follow H x + g - A_eq^T y - A_in^T z - z_lower + z_upper = 0, with
// z, z_lower, z_upper >= 0.
struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd y_eq;
  Eigen::VectorXd z_in;
  Eigen::VectorXd z_lower;
  Eigen::VectorXd z_upper;
  QpStatus status = QpStatus::kNumericalFailure;
  int iterations = 0;
};

// Primal-dual interior-point method (Mehrotra predictor-corrector) on slacked inequalities.
// H needs to be positive definite on the null space of A_eq.
QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings = {});

struct QpKkt {
  double stationarity = 0.0;
  double primal = 0.0;
  double complementarity = 0.0;
  double dual_sign = 0.0;  // most negative multiplier, as a positive number

  double max() const;
};

// Unscaled KKT residuals of a candidate solution.
QpKkt qp_kkt_residual(const QpProblem& problem, const QpSolution& solution);

}  // namespace shipdock
