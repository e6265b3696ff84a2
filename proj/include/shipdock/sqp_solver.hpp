#pragma once

#include <optional>

#include <Eigen/Core>

#include "shipdock/nlp.hpp"
#include "shipdock/qp_solver.hpp"

namespace shipdock {

enum class HessianMode {
  // The Nlp's lagrangian_hessian, regularized until the inertia is correct.
  kNlpHessian,
  // Powell-damped BFGS on a dense matrix; for small problems.
  kDampedBfgs,
};

struct SolverSettings {
  double kkt_tolerance = 1e-6;
  int max_iterations = 200;
  HessianMode hessian_mode = HessianMode::kNlpHessian;
  double regularization_floor = 1e-8;
  double penalty_growth = 2.0;       // penalty is raised to growth * required value
  double backtracking_ratio = 0.5;
  double armijo = 1e-4;
  double min_step_length = 1e-8;
  double elastic_penalty = 1e4;      // weight on elastic slacks during feasibility restoration
  QpSettings qp;
  bool verbose = false;

  // Throws PreconditionError on nonpositive entries or a backtracking ratio outside (0, 1).
  void validate() const;
};

enum class SolveStatus { kConverged, kMaxIterations, kInfeasibleQp, kLineSearchFailure };

const char* to_string(SolveStatus status);

struct SolveStats {
  int iterations = 0;
  int qp_iterations = 0;
  int elastic_steps = 0;
  double kkt_residual = 0.0;
  double wall_time_s = 0.0;
};

struct Multipliers {
  Eigen::VectorXd y_eq;
  Eigen::VectorXd z_in;
  Eigen::VectorXd z_lower;
  Eigen::VectorXd z_upper;

  static Multipliers zeros(const Nlp& nlp);
};

struct SolveResult {
  Eigen::VectorXd x;
  Multipliers multipliers;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kMaxIterations;
  SolveStats stats;
};

struct WarmStart {
  Eigen::VectorXd x;
  Multipliers multipliers;
};

struct KktResidual {
  double stationarity = 0.0;     // scaled
  double feasibility = 0.0;      // unscaled constraint violation
  double complementarity = 0.0;  // scaled
  double scaled() const;
};

// Scaled first-order optimality measure (stationarity and complementarity are divided by
// max(1, mean |multiplier| / 100)).
KktResidual kkt_residual(const Nlp& nlp, const Eigen::VectorXd& x, const Multipliers& mult);

// Function values and first derivatives at a point.
struct Linearization {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  Eigen::VectorXd c_eq;
  SparseMatrix J_eq;
  Eigen::VectorXd c_in;
  SparseMatrix J_in;
};

Linearization linearize(const Nlp& nlp, const Eigen::VectorXd& x);

// Per-row weights of the l1 penalty; each weight is kept above the magnitude of its row's
// current multiplier estimate.
struct PenaltyWeights {
  Eigen::VectorXd eq;
  Eigen::VectorXd in;

  static PenaltyWeights uniform(const Nlp& nlp, double value);
  double max() const;
};

// l1 merit f + sum_i nu_i |c_eq,i| + sum_j nu_j |min(c_in,j, 0)|.
double merit(const Nlp& nlp, const Eigen::VectorXd& x, const PenaltyWeights& penalty);

struct LineSearchOutcome {
  bool accepted = false;
  double step_length = 0.0;
  double merit = 0.0;
  double directional_derivative = 0.0;
  int evaluations = 0;
};

// Backtracking Armijo search on the l1 merit along `step`, using the linearized-model
// decrease as the predicted slope. Rejects non-descent steps without evaluating the merit.
LineSearchOutcome merit_line_search(const Nlp& nlp, const Linearization& lin,
                                    const Eigen::VectorXd& step, const PenaltyWeights& penalty,
                                    const SolverSettings& settings);

// SQP with interior-point QP subproblems and l1-merit backtracking.
SolveResult solve(const Nlp& nlp, const SolverSettings& settings = {},
                  const std::optional<WarmStart>& start = std::nullopt);

}  // namespace shipdock
