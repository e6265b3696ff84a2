#include "shipdock/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

using Triplet = Eigen::Triplet<double>;

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// Quasi-definite KKT matrix
//   [ H + dp I    A^T     C^T            ]
//   [ A          -dd I    0              ]
//   [ C           0      -(W + dd I)     ]
// stored lower-triangular; W (diagonal) changes every interior-point iteration.
class KktSystem {
 public:
  KktSystem(const SparseMatrix& H, const SparseMatrix& A, const SparseMatrix& C, double dp,
            double dd, int refinement_steps)
      : n_(static_cast<int>(H.rows())),
        m_(static_cast<int>(A.rows())),
        p_(static_cast<int>(C.rows())),
        dp_(dp),
        dd_(dd),
        refinement_steps_(refinement_steps) {
    const int dim = n_ + m_ + p_;
    std::vector<Triplet> trips;
    trips.reserve(H.nonZeros() + A.nonZeros() + C.nonZeros() + dim);
    for (int j = 0; j < dim; ++j) trips.emplace_back(j, j, 0.0);
    for (int k = 0; k < H.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(H, k); it; ++it) {
        if (it.row() >= it.col()) trips.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (int k = 0; k < A.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
        trips.emplace_back(n_ + it.row(), it.col(), it.value());
      }
    }
    for (int k = 0; k < C.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(C, k); it; ++it) {
        trips.emplace_back(n_ + m_ + it.row(), it.col(), it.value());
      }
    }
    K_.resize(dim, dim);
    K_.setFromTriplets(trips.begin(), trips.end());
    K_.makeCompressed();
    diag_.resize(dim);
    for (int j = 0; j < dim; ++j) {
      const int pos = K_.outerIndexPtr()[j];
      if (K_.innerIndexPtr()[pos] != j) throw Error("KKT assembly lost a diagonal entry");
      diag_[j] = pos;
    }
    base_diag_.resize(n_);
    for (int j = 0; j < n_; ++j) base_diag_[j] = K_.valuePtr()[diag_[j]];
    for (int j = 0; j < n_; ++j) K_.valuePtr()[diag_[j]] = base_diag_[j] + dp_;
    for (int j = n_; j < n_ + m_; ++j) K_.valuePtr()[diag_[j]] = -dd_;
    ldlt_.analyzePattern(K_);
  }

  bool factorize(const Eigen::VectorXd& w) {
    for (int i = 0; i < p_; ++i) K_.valuePtr()[diag_[n_ + m_ + i]] = -(w[i] + dd_);
    w_ = w;
    use_lu_ = false;
    ldlt_.factorize(K_);
    if (ldlt_.info() == Eigen::Success && ldlt_.vectorD().allFinite()) return true;
    return factorize_lu();
  }

  // Solves the unregularized system with iterative refinement on the regularized factors.
  bool solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& sol) {
    if (solve_with_current(rhs, sol)) return true;
    if (use_lu_ || !factorize_lu()) return false;
    return solve_with_current(rhs, sol);
  }

 private:
  bool factorize_lu() {
    const SparseMatrix full = K_.selfadjointView<Eigen::Lower>();
    lu_.analyzePattern(full);
    lu_.factorize(full);
    use_lu_ = lu_.info() == Eigen::Success;
    return use_lu_;
  }

  Eigen::VectorXd apply_true(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = K_.selfadjointView<Eigen::Lower>() * v;
    out.head(n_) -= dp_ * v.head(n_);
    out.segment(n_, m_) += dd_ * v.segment(n_, m_);
    out.tail(p_) += dd_ * v.tail(p_);
    return out;
  }

  Eigen::VectorXd raw_solve(const Eigen::VectorXd& rhs) const {
    return use_lu_ ? Eigen::VectorXd(lu_.solve(rhs)) : Eigen::VectorXd(ldlt_.solve(rhs));
  }

  bool solve_with_current(const Eigen::VectorXd& rhs, Eigen::VectorXd& sol) const {
    sol = raw_solve(rhs);
    const double scale = 1.0 + inf_norm(rhs);
    double res_norm = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= refinement_steps_; ++it) {
      if (!sol.allFinite()) return false;
      const Eigen::VectorXd res = rhs - apply_true(sol);
      res_norm = inf_norm(res);
      if (res_norm <= 1e-14 * scale || it == refinement_steps_) break;
      sol += raw_solve(res);
    }
    return res_norm <= 1e-8 * scale;
  }

  int n_, m_, p_;
  double dp_, dd_;
  int refinement_steps_;
  SparseMatrix K_;
  std::vector<int> diag_;
  Eigen::VectorXd base_diag_;
  Eigen::VectorXd w_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  bool use_lu_ = false;
};

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  return alpha;
}

}  // namespace

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kSolved: return "solved";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kMaxIterations: return "max_iterations";
    case QpStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

double QpKkt::max() const {
  return std::max({stationarity, primal, complementarity, dual_sign});
}

QpSolution solve_qp(const QpProblem& qp, const QpSettings& settings) {
  const int n = qp.num_variables();
  if (qp.H.rows() != n || qp.H.cols() != n) throw DimensionMismatch("QP Hessian size");
  const int m_eq = static_cast<int>(qp.b_eq.size());
  const int m_in = static_cast<int>(qp.b_in.size());
  if ((m_eq > 0 && (qp.A_eq.rows() != m_eq || qp.A_eq.cols() != n)) ||
      (m_in > 0 && (qp.A_in.rows() != m_in || qp.A_in.cols() != n))) {
    throw DimensionMismatch("QP constraint matrix size");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd lower = qp.lower.size() ? qp.lower : Eigen::VectorXd::Constant(n, -inf);
  const Eigen::VectorXd upper = qp.upper.size() ? qp.upper : Eigen::VectorXd::Constant(n, inf);

  // Fixed variables become equality rows; other finite bounds become inequality rows.
  std::vector<int> fixed_vars, lower_vars, upper_vars;
  for (int i = 0; i < n; ++i) {
    if (lower[i] > upper[i]) {
      QpSolution out;
      out.status = QpStatus::kInfeasible;
      return out;
    }
    if (std::isfinite(lower[i]) && lower[i] == upper[i]) {
      fixed_vars.push_back(i);
      continue;
    }
    if (std::isfinite(lower[i])) lower_vars.push_back(i);
    if (std::isfinite(upper[i])) upper_vars.push_back(i);
  }
  const int m = m_eq + static_cast<int>(fixed_vars.size());
  const int p = m_in + static_cast<int>(lower_vars.size() + upper_vars.size());

  SparseMatrix A(m, n);
  Eigen::VectorXd b(m);
  {
    std::vector<Triplet> t;
    if (m_eq > 0) {
      for (int k = 0; k < qp.A_eq.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(qp.A_eq, k); it; ++it)
          t.emplace_back(it.row(), it.col(), it.value());
      b.head(m_eq) = qp.b_eq;
    }
    for (std::size_t r = 0; r < fixed_vars.size(); ++r) {
      t.emplace_back(m_eq + static_cast<int>(r), fixed_vars[r], 1.0);
      b[m_eq + static_cast<int>(r)] = lower[fixed_vars[r]];
    }
    A.setFromTriplets(t.begin(), t.end());
  }
  SparseMatrix C(p, n);
  Eigen::VectorXd d(p);
  {
    std::vector<Triplet> t;
    if (m_in > 0) {
      for (int k = 0; k < qp.A_in.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(qp.A_in, k); it; ++it)
          t.emplace_back(it.row(), it.col(), it.value());
      d.head(m_in) = qp.b_in;
    }
    int row = m_in;
    for (int i : lower_vars) {
      t.emplace_back(row, i, 1.0);
      d[row++] = lower[i];
    }
    for (int i : upper_vars) {
      t.emplace_back(row, i, -1.0);
      d[row++] = -upper[i];
    }
    C.setFromTriplets(t.begin(), t.end());
  }
  const SparseMatrix At = A.transpose();
  const SparseMatrix Ct = C.transpose();

  KktSystem kkt(qp.H, A, C, settings.primal_regularization, settings.dual_regularization,
                settings.refinement_steps);

  QpSolution out;
  Eigen::VectorXd x(n), y = Eigen::VectorXd::Zero(m), z(p), s(p);
  const int dim = n + m + p;
  Eigen::VectorXd rhs(dim), sol(dim);

  // Starting point: the least-squares point obtained with unit slack scaling, shifted into
  // the positive orthant.
  if (!kkt.factorize(Eigen::VectorXd::Ones(p))) {
    out.status = QpStatus::kNumericalFailure;
    return out;
  }
  rhs << -qp.g, b, d;
  if (!kkt.solve(rhs, sol)) {
    out.status = QpStatus::kNumericalFailure;
    return out;
  }
  x = sol.head(n);
  y = -sol.segment(n, m);
  s = C * x - d;
  z = -s;
  if (p > 0) {
    const double shift_s = -s.minCoeff();
    if (shift_s >= 0.0) s.array() += 1.0 + shift_s;
    const double shift_z = -z.minCoeff();
    if (shift_z >= 0.0) z.array() += 1.0 + shift_z;
  }

  const double g_scale = 1.0 + inf_norm(qp.g);
  const double b_scale = 1.0 + inf_norm(b);
  const double d_scale = 1.0 + inf_norm(d);

  for (int iter = 0; iter <= settings.max_iterations; ++iter) {
    const Eigen::VectorXd r_d = qp.H * x + qp.g - At * y - Ct * z;
    const Eigen::VectorXd r_e = A * x - b;
    const Eigen::VectorXd r_i = C * x - s - d;
    const double mu = p > 0 ? s.dot(z) / p : 0.0;
    const double comp = p > 0 ? (s.array() * z.array()).maxCoeff() : 0.0;
    out.iterations = iter;

    if (inf_norm(r_d) <= settings.tolerance * g_scale && inf_norm(r_e) <= settings.tolerance * b_scale &&
        inf_norm(r_i) <= settings.tolerance * d_scale && comp <= settings.tolerance) {
      out.status = QpStatus::kSolved;
      break;
    }
    const double dual_size = std::max(inf_norm(y), inf_norm(z));
    if (!x.allFinite() || dual_size > 1e12 * g_scale) {
      out.status = QpStatus::kInfeasible;
      break;
    }
    // A breakdown with growing duals and a persistent primal gap is how infeasibility shows up.
    const double primal_gap = std::max(inf_norm(r_e) / b_scale, inf_norm(r_i) / d_scale);
    const QpStatus breakdown =
        primal_gap > 1e-6 && dual_size > 1e4 * g_scale ? QpStatus::kInfeasible : QpStatus::kNumericalFailure;
    if (iter == settings.max_iterations) {
      out.status = primal_gap > 1e-6 ? QpStatus::kInfeasible : QpStatus::kMaxIterations;
      break;
    }

    if (!kkt.factorize((s.array() / z.array()).matrix())) {
      out.status = breakdown;
      break;
    }

    auto direction = [&](const Eigen::VectorXd& r_c, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                         Eigen::VectorXd& dz, Eigen::VectorXd& ds) {
      rhs << -r_d, -r_e, -r_i - (r_c.array() / z.array()).matrix();
      if (!kkt.solve(rhs, sol)) return false;
      dx = sol.head(n);
      dy = -sol.segment(n, m);
      dz = -sol.tail(p);
      ds = C * dx + r_i;
      return true;
    };

    Eigen::VectorXd dx, dy, dz, ds;
    const Eigen::VectorXd r_c_aff = (s.array() * z.array()).matrix();
    if (!direction(r_c_aff, dx, dy, dz, ds)) {
      out.status = breakdown;
      break;
    }
    Eigen::VectorXd r_c = r_c_aff;
    if (p > 0) {
      const double alpha_aff = std::min(max_step(s, ds), max_step(z, dz));
      const double mu_aff = (s + alpha_aff * ds).dot(z + alpha_aff * dz) / p;
      const double sigma = std::pow(mu_aff / mu, 3.0);
      r_c = (s.array() * z.array() + ds.array() * dz.array() - sigma * mu).matrix();
      if (!direction(r_c, dx, dy, dz, ds)) {
        out.status = breakdown;
        break;
      }
    }
    const double tau = std::max(0.995, 1.0 - mu);
    const double alpha = p > 0 ? std::min(1.0, tau * std::min(max_step(s, ds), max_step(z, dz))) : 1.0;
    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
  }

  out.x = x;
  out.y_eq = y.head(m_eq);
  out.z_in = z.head(m_in);
  out.z_lower = Eigen::VectorXd::Zero(n);
  out.z_upper = Eigen::VectorXd::Zero(n);
  int row = m_in;
  for (int i : lower_vars) out.z_lower[i] = z[row++];
  for (int i : upper_vars) out.z_upper[i] = z[row++];
  // A fixed variable's equality multiplier splits into the bound multiplier of matching sign.
  for (std::size_t r = 0; r < fixed_vars.size(); ++r) {
    const double mult = y[m_eq + static_cast<int>(r)];
    if (mult >= 0.0) {
      out.z_lower[fixed_vars[r]] = mult;
    } else {
      out.z_upper[fixed_vars[r]] = -mult;
    }
  }
  return out;
}

QpKkt qp_kkt_residual(const QpProblem& qp, const QpSolution& sol) {
  const int n = qp.num_variables();
  QpKkt k;
  Eigen::VectorXd r = qp.H * sol.x + qp.g - sol.z_lower + sol.z_upper;
  if (qp.b_eq.size()) r -= qp.A_eq.transpose() * sol.y_eq;
  if (qp.b_in.size()) r -= qp.A_in.transpose() * sol.z_in;
  k.stationarity = inf_norm(r);
  if (qp.b_eq.size()) k.primal = std::max(k.primal, inf_norm(qp.A_eq * sol.x - qp.b_eq));
  if (qp.b_in.size()) {
    const Eigen::VectorXd c = qp.A_in * sol.x - qp.b_in;
    k.primal = std::max(k.primal, std::max(0.0, -c.minCoeff()));
    k.complementarity = std::max(k.complementarity, (c.array() * sol.z_in.array()).abs().maxCoeff());
    k.dual_sign = std::max(k.dual_sign, std::max(0.0, -sol.z_in.minCoeff()));
  }
  for (int i = 0; i < n; ++i) {
    if (qp.lower.size() && std::isfinite(qp.lower[i])) {
      k.primal = std::max(k.primal, qp.lower[i] - sol.x[i]);
      k.complementarity = std::max(k.complementarity, std::abs((sol.x[i] - qp.lower[i]) * sol.z_lower[i]));
    }
    if (qp.upper.size() && std::isfinite(qp.upper[i])) {
      k.primal = std::max(k.primal, sol.x[i] - qp.upper[i]);
      k.complementarity = std::max(k.complementarity, std::abs((qp.upper[i] - sol.x[i]) * sol.z_upper[i]));
    }
  }
  k.dual_sign = std::max({k.dual_sign, n ? std::max(0.0, -sol.z_lower.minCoeff()) : 0.0,
                          n ? std::max(0.0, -sol.z_upper.minCoeff()) : 0.0});
  return k;
}

}  // namespace shipdock
