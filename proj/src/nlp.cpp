#include "shipdock/nlp.hpp"

#include <limits>

#include "shipdock/error.hpp"

namespace shipdock {

FunctionNlp::FunctionNlp(int n)
    : n_(n),
      lower_(Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity())),
      upper_(Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity())),
      x0_(Eigen::VectorXd::Zero(n)) {}

FunctionNlp& FunctionNlp::set_objective(Scalar f, Vector gradient) {
  f_ = std::move(f);
  grad_ = std::move(gradient);
  return *this;
}

FunctionNlp& FunctionNlp::set_equalities(int m, Vector c, Matrix jacobian) {
  m_eq_ = m;
  c_eq_ = std::move(c);
  j_eq_ = std::move(jacobian);
  return *this;
}

FunctionNlp& FunctionNlp::set_inequalities(int m, Vector c, Matrix jacobian) {
  m_in_ = m;
  c_in_ = std::move(c);
  j_in_ = std::move(jacobian);
  return *this;
}

FunctionNlp& FunctionNlp::set_hessian(Hessian hessian) {
  hess_ = std::move(hessian);
  return *this;
}

FunctionNlp& FunctionNlp::set_bounds(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != n_ || upper.size() != n_) throw DimensionMismatch("bounds size");
  lower_ = std::move(lower);
  upper_ = std::move(upper);
  return *this;
}

FunctionNlp& FunctionNlp::set_initial_guess(Eigen::VectorXd x0) {
  if (x0.size() != n_) throw DimensionMismatch("initial guess size");
  x0_ = std::move(x0);
  return *this;
}

Eigen::VectorXd FunctionNlp::equalities(const Eigen::VectorXd& x) const {
  return m_eq_ ? c_eq_(x) : Eigen::VectorXd();
}

SparseMatrix FunctionNlp::equality_jacobian(const Eigen::VectorXd& x) const {
  if (!m_eq_) return SparseMatrix(0, n_);
  return j_eq_(x).sparseView();
}

Eigen::VectorXd FunctionNlp::inequalities(const Eigen::VectorXd& x) const {
  return m_in_ ? c_in_(x) : Eigen::VectorXd();
}

SparseMatrix FunctionNlp::inequality_jacobian(const Eigen::VectorXd& x) const {
  if (!m_in_) return SparseMatrix(0, n_);
  return j_in_(x).sparseView();
}

SparseMatrix FunctionNlp::lagrangian_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                                             const Eigen::VectorXd& z_in) const {
  if (!hess_) return SparseMatrix(n_, n_);
  return hess_(x, y_eq, z_in).sparseView();
}

}  // namespace shipdock
