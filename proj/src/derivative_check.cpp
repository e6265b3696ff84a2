#include "shipdock/derivative_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

void compare(const char* block, const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd,
             DerivativeReport& report) {
  for (int j = 0; j < analytic.cols(); ++j) {
    for (int i = 0; i < analytic.rows(); ++i) {
      const double a = analytic(i, j);
      const double f = fd(i, j);
      const double err = std::abs(a - f) / std::max({1.0, std::abs(a), std::abs(f)});
      ++report.entries_checked;
      if (err > report.worst.relative_error || report.worst.row < 0) {
        report.worst = {block, i, j, a, f, err};
      }
    }
  }
}

Eigen::VectorXd lagrangian_gradient(const Nlp& nlp, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
  Eigen::VectorXd g = nlp.objective_gradient(x);
  if (y.size()) g -= nlp.equality_jacobian(x).transpose() * y;
  if (z.size()) g -= nlp.inequality_jacobian(x).transpose() * z;
  return g;
}

// Ridders' extrapolation of central differences with steps shrinking from `step`, entry by
// entry, keeping the estimate with the smallest error estimate.
template <typename F>
Eigen::VectorXd ridders(const F& g, Eigen::VectorXd& x, int j, double step) {
  constexpr int kLevels = 10;
  constexpr double kShrink = 1.4;
  const double xj = x[j];
  auto central = [&](double h) {
    x[j] = xj + h;
    Eigen::VectorXd v = g(x);
    x[j] = xj - h;
    v -= g(x);
    x[j] = xj;
    return Eigen::VectorXd(v / (2.0 * h));
  };
  std::vector<std::vector<Eigen::VectorXd>> table(kLevels);
  double h = step;
  table[0].push_back(central(h));
  Eigen::VectorXd best = table[0][0];
  Eigen::VectorXd best_error = Eigen::VectorXd::Constant(best.size(), std::numeric_limits<double>::infinity());
  for (int i = 1; i < kLevels; ++i) {
    h /= kShrink;
    table[i].push_back(central(h));
    double factor = kShrink * kShrink;
    for (int k = 1; k <= i; ++k) {
      table[i].push_back((factor * table[i][k - 1] - table[i - 1][k - 1]) / (factor - 1.0));
      factor *= kShrink * kShrink;
      for (int e = 0; e < best.size(); ++e) {
        const double err = std::max(std::abs(table[i][k][e] - table[i][k - 1][e]),
                                    std::abs(table[i][k][e] - table[i - 1][k - 1][e]));
        if (err <= best_error[e]) {
          best_error[e] = err;
          best[e] = table[i][k][e];
        }
      }
    }
  }
  return best;
}

// Column j of the Jacobian of g by the chosen stencil. The five-point rule falls back to
// Ridders' extrapolation on columns where it disagrees with the three-point rule, which happens
// where the function varies on a scale close to `step`.
template <typename F>
Eigen::VectorXd difference(const F& g, Eigen::VectorXd& x, int j, double step, Stencil stencil) {
  const double xj = x[j];
  auto at = [&](double offset) {
    x[j] = xj + offset;
    Eigen::VectorXd v = g(x);
    x[j] = xj;
    return v;
  };
  const Eigen::VectorXd d1 = at(step) - at(-step);
  if (stencil == Stencil::kThreePoint) return d1 / (2.0 * step);
  const Eigen::VectorXd d2 = at(2.0 * step) - at(-2.0 * step);
  const Eigen::VectorXd five = (8.0 * d1 - d2) / (12.0 * step);
  const Eigen::VectorXd three = d1 / (2.0 * step);
  const Eigen::ArrayXd scale = five.cwiseAbs().array().max(1.0);
  if (((three - five).cwiseAbs().array() / scale).maxCoeff() <= 1e-6) return five;
  return ridders(g, x, j, 4.0 * step);
}

}  // namespace

std::string DerivativeReport::describe() const {
  std::ostringstream os;
  os.precision(3);
  os << "max relative error " << std::scientific << worst.relative_error << " in " << worst.block
     << " at (" << worst.row << ", " << worst.col << "): analytic " << worst.analytic
     << ", finite difference " << worst.finite_difference << " (" << entries_checked
     << " entries)";
  return os.str();
}

DerivativeReport derivative_check(const Nlp& nlp, const Eigen::VectorXd& x, double perturbation,
                                  Stencil stencil) {
  const int n = nlp.num_variables();
  if (x.size() != n) throw DimensionMismatch("derivative_check: point dimension");
  if (!(perturbation > 0.0)) throw PreconditionError("derivative_check: perturbation must be positive");
  const int m_eq = nlp.num_equalities();
  const int m_in = nlp.num_inequalities();

  Eigen::MatrixXd fd_grad(1, n), fd_eq(m_eq, n), fd_in(m_in, n);
  Eigen::VectorXd xw = x;
  // One pass per column evaluates all three functions at each perturbed point.
  auto all = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd v(1 + m_eq + m_in);
    v[0] = nlp.objective(p);
    if (m_eq) v.segment(1, m_eq) = nlp.equalities(p);
    if (m_in) v.tail(m_in) = nlp.inequalities(p);
    return v;
  };
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd col = difference(all, xw, j, perturbation, stencil);
    fd_grad(0, j) = col[0];
    if (m_eq) fd_eq.col(j) = col.segment(1, m_eq);
    if (m_in) fd_in.col(j) = col.tail(m_in);
  }

  DerivativeReport report;
  compare("gradient", nlp.objective_gradient(x).transpose(), fd_grad, report);
  if (m_eq) compare("equality_jacobian", Eigen::MatrixXd(nlp.equality_jacobian(x)), fd_eq, report);
  if (m_in) compare("inequality_jacobian", Eigen::MatrixXd(nlp.inequality_jacobian(x)), fd_in, report);
  return report;
}

DerivativeReport hessian_check(const Nlp& nlp, const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                               const Eigen::VectorXd& z_in, double perturbation, Stencil stencil) {
  const int n = nlp.num_variables();
  if (x.size() != n || y_eq.size() != nlp.num_equalities() || z_in.size() != nlp.num_inequalities()) {
    throw DimensionMismatch("hessian_check: dimensions");
  }
  if (!(perturbation > 0.0)) throw PreconditionError("hessian_check: perturbation must be positive");
  Eigen::MatrixXd fd(n, n);
  Eigen::VectorXd xw = x;
  auto grad = [&](const Eigen::VectorXd& p) { return lagrangian_gradient(nlp, p, y_eq, z_in); };
  for (int j = 0; j < n; ++j) fd.col(j) = difference(grad, xw, j, perturbation, stencil);
  DerivativeReport report;
  compare("hessian", Eigen::MatrixXd(nlp.lagrangian_hessian(x, y_eq, z_in)), fd, report);
  return report;
}

Eigen::VectorXd random_point(const Nlp& nlp, const Eigen::VectorXd& center, double spread,
                             std::uint64_t seed) {
  const Eigen::VectorXd lo = nlp.lower_bounds();
  const Eigen::VectorXd hi = nlp.upper_bounds();
  if (center.size() != lo.size()) throw DimensionMismatch("random_point: center dimension");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(lo.size());
  for (int i = 0; i < x.size(); ++i) {
    const double a = std::isfinite(lo[i]) ? lo[i] : center[i] - spread;
    const double b = std::isfinite(hi[i]) ? hi[i] : center[i] + spread;
    x[i] = a + (b - a) * unit(rng);
  }
  return x;
}

}  // namespace shipdock
