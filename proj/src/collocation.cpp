#include "shipdock/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/LU>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

// Legendre P_n and its derivative on [-1, 1] by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

std::vector<double> legendre_roots_unit(int degree) {
  std::vector<double> roots;
  for (int i = 0; i < degree; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (degree + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(degree, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    roots.push_back(0.5 * (x + 1.0));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Coefficients (ascending powers) of the j-th Lagrange basis polynomial.
Eigen::VectorXd lagrange_coefficients(const Eigen::VectorXd& nodes, int j) {
  const int n = static_cast<int>(nodes.size());
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n);
  coeffs[0] = 1.0;
  double denom = 1.0;
  int degree = 0;
  for (int m = 0; m < n; ++m) {
    if (m == j) continue;
    for (int p = degree + 1; p >= 1; --p) coeffs[p] = coeffs[p - 1] - nodes[m] * coeffs[p];
    coeffs[0] *= -nodes[m];
    ++degree;
    denom *= nodes[j] - nodes[m];
  }
  return coeffs / denom;
}

}  // namespace

CollocationGrid legendre_grid(int degree, double h) {
  if (degree < 1 || degree > 5) throw PreconditionError("collocation degree must be in 1..5");
  if (!(h > 0.0)) throw PreconditionError("collocation interval length must be positive");

  CollocationGrid grid;
  grid.degree = degree;
  grid.h = h;
  const std::vector<double> roots = legendre_roots_unit(degree);
  grid.tau_points = Eigen::Map<const Eigen::VectorXd>(roots.data(), degree);
  grid.nodes.resize(degree + 1);
  grid.nodes[0] = 0.0;
  grid.nodes.tail(degree) = grid.tau_points;

  const int n = degree + 1;
  Eigen::VectorXd bary(n);
  for (int j = 0; j < n; ++j) {
    double prod = 1.0;
    for (int m = 0; m < n; ++m) {
      if (m != j) prod *= grid.nodes[j] - grid.nodes[m];
    }
    bary[j] = 1.0 / prod;
  }
  grid.diff_matrix.resize(n, n);
  for (int k = 0; k < n; ++k) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      const double entry = (bary[j] / bary[k]) / (grid.nodes[k] - grid.nodes[j]);
      grid.diff_matrix(j, k) = entry;
      diag -= entry;
    }
    grid.diff_matrix(k, k) = diag;
  }

  grid.quad_weights.resize(n);
  grid.end_weights.resize(n);
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd c = lagrange_coefficients(grid.nodes, j);
    double integral = 0.0;
    double at_one = 0.0;
    for (int p = 0; p < n; ++p) {
      integral += c[p] / (p + 1.0);
      at_one += c[p];
    }
    grid.quad_weights[j] = integral;
    grid.end_weights[j] = at_one;
  }
  return grid;
}

Eigen::VectorXd interpolate_end(const CollocationGrid& grid, const Eigen::MatrixXd& states) {
  return states * grid.end_weights;
}

Eigen::VectorXd collocation_defects(const CollocationGrid& grid, const Eigen::MatrixXd& states,
                                    const Eigen::VectorXd& next_boundary, const OdeRhs& rhs) {
  const int d = grid.degree;
  const Eigen::Index dim = states.rows();
  if (states.cols() != d + 1 || next_boundary.size() != dim) {
    throw DimensionMismatch("collocation_defects: state block has the wrong shape");
  }
  Eigen::VectorXd out(dim * (d + 1));
  for (int k = 1; k <= d; ++k) {
    out.segment(dim * (k - 1), dim) =
        states * grid.diff_matrix.col(k) - grid.h * rhs(states.col(k));
  }
  out.tail(dim) = interpolate_end(grid, states) - next_boundary;
  return out;
}

CollocationStep solve_collocation_interval(const CollocationGrid& grid, const Eigen::VectorXd& x0,
                                           const OdeRhs& rhs, const OdeJacobian& jacobian,
                                           double tolerance, int max_iterations) {
  const int d = grid.degree;
  const Eigen::Index dim = x0.size();
  CollocationStep step;
  step.states = x0.replicate(1, d + 1);

  Eigen::VectorXd residual(dim * d);
  Eigen::MatrixXd jac(dim * d, dim * d);
  for (int it = 0; it < max_iterations; ++it) {
    jac.setZero();
    for (int k = 1; k <= d; ++k) {
      residual.segment(dim * (k - 1), dim) =
          step.states * grid.diff_matrix.col(k) - grid.h * rhs(step.states.col(k));
      for (int j = 1; j <= d; ++j) {
        jac.block(dim * (k - 1), dim * (j - 1), dim, dim).diagonal().array() +=
            grid.diff_matrix(j, k);
      }
      jac.block(dim * (k - 1), dim * (k - 1), dim, dim) -= grid.h * jacobian(step.states.col(k));
    }
    step.newton_iterations = it;
    if (residual.lpNorm<Eigen::Infinity>() <= tolerance) {
      step.converged = true;
      break;
    }
    const Eigen::VectorXd delta = jac.partialPivLu().solve(-residual);
    for (int k = 1; k <= d; ++k) step.states.col(k) += delta.segment(dim * (k - 1), dim);
    step.newton_iterations = it + 1;
  }
  step.end_state = interpolate_end(grid, step.states);
  return step;
}

}  // namespace shipdock
