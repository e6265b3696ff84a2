#pragma once

#include <functional>

#include <Eigen/Core>

namespace shipdock {

// Lagrange collocation on one interval of length h with nodes {0} U {Gauss-Legendre roots}.
struct CollocationGrid {
  int degree = 0;
  double h = 0.0;
  Eigen::VectorXd tau_points;  // d roots of the shifted Legendre polynomial, ascending
  Eigen::VectorXd nodes;       // d + 1 nodes: 0 followed by tau_points
  // diff_matrix(j, k) = l_j'(nodes[k]); derivative of the interpolant at node k is
  // sum_j diff_matrix(j, k) * x_j (per unit of normalized time).
  Eigen::MatrixXd diff_matrix;
  Eigen::VectorXd quad_weights;  // integral over [0, 1] of l_j
  Eigen::VectorXd end_weights;   // l_j(1)
};

// Grid for degree 1..5. Throws PreconditionError otherwise or when h <= 0.
CollocationGrid legendre_grid(int degree, double h);

using OdeRhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using OdeJacobian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// `states` holds the boundary state followed by the d collocation states as columns.
// Returns [defect_1, ..., defect_d, continuity] stacked, each block of the state dimension:
// defect_k = sum_j D(j, k) x_j - h f(x_k), continuity = sum_j end_weights_j x_j - next_boundary.
Eigen::VectorXd collocation_defects(const CollocationGrid& grid, const Eigen::MatrixXd& states,
                                    const Eigen::VectorXd& next_boundary, const OdeRhs& rhs);

// Value of the interval interpolant at normalized time 1.
Eigen::VectorXd interpolate_end(const CollocationGrid& grid, const Eigen::MatrixXd& states);

struct CollocationStep {
  Eigen::MatrixXd states;  // boundary + collocation states as columns
  Eigen::VectorXd end_state;
  int newton_iterations = 0;
  bool converged = false;
};

// Solves the defect equations of one interval for the collocation states by Newton's method,
// i.e. takes one implicit Gauss-Legendre step from x0.
CollocationStep solve_collocation_interval(const CollocationGrid& grid, const Eigen::VectorXd& x0,
                                           const OdeRhs& rhs, const OdeJacobian& jacobian,
                                           double tolerance = 1e-12, int max_iterations = 50);

}  // namespace shipdock
