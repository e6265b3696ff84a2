#pragma once

#include <functional>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace shipdock {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Smooth nonlinear program
//   min f(x)  s.t.  c_eq(x) = 0,  c_in(x) >= 0,  lower <= x <= upper.
// Multiplier convention: L = f - y^T c_eq - z^T c_in, with z >= 0.
// Implementations must be deterministic and safe to evaluate concurrently.
class Nlp {
 public:
  virtual ~Nlp() = default;

  virtual int num_variables() const = 0;
  virtual int num_equalities() const = 0;
  virtual int num_inequalities() const = 0;

  virtual Eigen::VectorXd lower_bounds() const = 0;
  virtual Eigen::VectorXd upper_bounds() const = 0;
  virtual Eigen::VectorXd initial_guess() const = 0;

  virtual double objective(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd objective_gradient(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd equalities(const Eigen::VectorXd& x) const = 0;
  virtual SparseMatrix equality_jacobian(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd inequalities(const Eigen::VectorXd& x) const = 0;
  virtual SparseMatrix inequality_jacobian(const Eigen::VectorXd& x) const = 0;

  // Hessian (or a structured approximation) of the Lagrangian, full symmetric storage.
  virtual SparseMatrix lagrangian_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                                          const Eigen::VectorXd& z_in) const = 0;
};

// Small dense problems assembled from callables; used for analytic test problems.
class FunctionNlp final : public Nlp {
 public:
  using Scalar = std::function<double(const Eigen::VectorXd&)>;
  using Vector = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Matrix = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
  using Hessian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                                const Eigen::VectorXd&)>;

  explicit FunctionNlp(int n);

  FunctionNlp& set_objective(Scalar f, Vector gradient);
  FunctionNlp& set_equalities(int m, Vector c, Matrix jacobian);
  FunctionNlp& set_inequalities(int m, Vector c, Matrix jacobian);
  FunctionNlp& set_hessian(Hessian hessian);
  FunctionNlp& set_bounds(Eigen::VectorXd lower, Eigen::VectorXd upper);
  FunctionNlp& set_initial_guess(Eigen::VectorXd x0);

  int num_variables() const override { return n_; }
  int num_equalities() const override { return m_eq_; }
  int num_inequalities() const override { return m_in_; }
  Eigen::VectorXd lower_bounds() const override { return lower_; }
  Eigen::VectorXd upper_bounds() const override { return upper_; }
  Eigen::VectorXd initial_guess() const override { return x0_; }

  double objective(const Eigen::VectorXd& x) const override { return f_(x); }
  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& x) const override { return grad_(x); }
  Eigen::VectorXd equalities(const Eigen::VectorXd& x) const override;
  SparseMatrix equality_jacobian(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd inequalities(const Eigen::VectorXd& x) const override;
  SparseMatrix inequality_jacobian(const Eigen::VectorXd& x) const override;
  SparseMatrix lagrangian_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                                  const Eigen::VectorXd& z_in) const override;

 private:
  int n_;
  int m_eq_ = 0;
  int m_in_ = 0;
  Scalar f_;
  Vector grad_;
  Vector c_eq_;
  Matrix j_eq_;
  Vector c_in_;
  Matrix j_in_;
  Hessian hess_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Eigen::VectorXd x0_;
};

}  // namespace shipdock
