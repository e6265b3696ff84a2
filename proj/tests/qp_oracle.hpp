#pragma once

// Active-set enumeration for small strictly convex QPs with inequality rows only:
//   min 1/2 x^T H x + g^T x  s.t.  A x >= b.
// Tries every subset of rows as the active set, solves the equality-constrained KKT system,
// and returns the unique subset whose point is feasible with nonnegative multipliers.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "shipdock/qp_solver.hpp"

namespace shipdock::testing {

struct DenseQp {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

inline std::optional<Eigen::VectorXd> brute_force_qp(const DenseQp& qp, double tol = 1e-9) {
  const int n = static_cast<int>(qp.g.size());
  const int m = static_cast<int>(qp.b.size());
  std::optional<Eigen::VectorXd> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> active;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) active.push_back(i);
    }
    const int k = static_cast<int>(active.size());
    if (k > n) continue;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
    Eigen::VectorXd rhs(n + k);
    K.topLeftCorner(n, n) = qp.H;
    rhs.head(n) = -qp.g;
    for (int r = 0; r < k; ++r) {
      K.block(0, n + r, n, 1) = -qp.A.row(active[r]).transpose();
      K.block(n + r, 0, 1, n) = qp.A.row(active[r]);
      rhs[n + r] = qp.b[active[r]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    if (((qp.A * x - qp.b).array() < -tol).any()) continue;
    if (k > 0 && (sol.tail(k).array() < -tol).any()) continue;
    const double value = 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  return best;
}

// Strictly convex QP with a feasible interior: the rows pass at a random distance around a
// random point x_feasible.
inline DenseQp random_qp(int n, int m, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseQp qp;
  const Eigen::MatrixXd L = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return normal(rng); });
  qp.H = L * L.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
  qp.g = Eigen::VectorXd::NullaryExpr(n, [&] { return 3.0 * normal(rng); });
  qp.A = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return normal(rng); });
  const Eigen::VectorXd x_feasible = Eigen::VectorXd::NullaryExpr(n, [&] { return normal(rng); });
  qp.b = qp.A * x_feasible - Eigen::VectorXd::NullaryExpr(m, [&] { return unit(rng); });
  return qp;
}

inline QpProblem to_problem(const DenseQp& qp) {
  QpProblem p;
  const int n = static_cast<int>(qp.g.size());
  p.H = qp.H.sparseView();
  p.g = qp.g;
  p.A_eq = SparseMatrix(0, n);
  p.b_eq = Eigen::VectorXd(0);
  p.A_in = qp.A.sparseView();
  p.b_in = qp.b;
  return p;
}

}  // namespace shipdock::testing
