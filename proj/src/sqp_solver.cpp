#include "shipdock/sqp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

using Triplet = Eigen::Triplet<double>;

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }
double l1_norm(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<1>() : 0.0; }

double weighted_violation(const Eigen::VectorXd& c_eq, const Eigen::VectorXd& c_in,
                          const PenaltyWeights& w) {
  double v = 0.0;
  if (c_eq.size()) v += w.eq.dot(c_eq.cwiseAbs());
  if (c_in.size()) v += w.in.dot((-c_in.array()).max(0.0).matrix());
  return v;
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

void damped_bfgs_update(Eigen::MatrixXd& B, const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  const Eigen::VectorXd Bs = B * s;
  const double sBs = s.dot(Bs);
  if (!(sBs > 1e-16)) return;
  const double sy = s.dot(y);
  Eigen::VectorXd r = y;
  if (sy < 0.2 * sBs) {
    const double theta = 0.8 * sBs / (sBs - sy);
    r = theta * y + (1.0 - theta) * Bs;
  }
  B += -Bs * Bs.transpose() / sBs + r * r.transpose() / s.dot(r);
}

// Counts the inertia of [H + lambda I, J^T; J, -delta I]; correct when it has n positive
// and m negative eigenvalues, i.e. H + lambda I is positive definite on null(J).
bool inertia_correct(const SparseMatrix& H, const SparseMatrix& J, double lambda) {
  const int n = static_cast<int>(H.rows());
  const int m = static_cast<int>(J.rows());
  std::vector<Triplet> trips;
  trips.reserve(H.nonZeros() + J.nonZeros() + n + m);
  for (int k = 0; k < H.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(H, k); it; ++it)
      if (it.row() >= it.col()) trips.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i) trips.emplace_back(i, i, lambda);
  for (int k = 0; k < J.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(J, k); it; ++it)
      trips.emplace_back(n + it.row(), it.col(), it.value());
  for (int i = 0; i < m; ++i) trips.emplace_back(n + i, n + i, -1e-10);
  SparseMatrix K(n + m, n + m);
  K.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(K);
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::VectorXd D = ldlt.vectorD();
  if (!D.allFinite()) return false;
  const int pos = static_cast<int>((D.array() > 0.0).count());
  const int neg = static_cast<int>((D.array() < 0.0).count());
  return pos == n && neg == m;
}

SparseMatrix add_diagonal(const SparseMatrix& H, double lambda) {
  SparseMatrix I(H.rows(), H.cols());
  I.setIdentity();
  return H + lambda * I;
}

KktResidual kkt_from_linearization(const Nlp& nlp, const Linearization& lin, const Multipliers& mult,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const int n = nlp.num_variables();
  const int m_eq = nlp.num_equalities();
  const int m_in = nlp.num_inequalities();
  constexpr double kScaleMax = 100.0;

  Eigen::VectorXd r = lin.grad - mult.z_lower + mult.z_upper;
  if (m_eq) r -= lin.J_eq.transpose() * mult.y_eq;
  if (m_in) r -= lin.J_in.transpose() * mult.z_in;

  const double mult_sum = l1_norm(mult.y_eq) + l1_norm(mult.z_in) + l1_norm(mult.z_lower) +
                          l1_norm(mult.z_upper);
  const double s_d = std::max(kScaleMax, mult_sum / std::max(1, m_eq + m_in + 2 * n)) / kScaleMax;
  const double ineq_sum = l1_norm(mult.z_in) + l1_norm(mult.z_lower) + l1_norm(mult.z_upper);
  const double s_c = std::max(kScaleMax, ineq_sum / std::max(1, m_in + 2 * n)) / kScaleMax;

  KktResidual k;
  k.stationarity = inf_norm(r) / s_d;
  double feas = inf_norm(lin.c_eq);
  double comp = 0.0;
  double sign = 0.0;
  if (m_in) {
    feas = std::max(feas, std::max(0.0, -lin.c_in.minCoeff()));
    comp = (lin.c_in.array() * mult.z_in.array()).abs().maxCoeff();
    sign = std::max(0.0, -mult.z_in.minCoeff());
  }
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(lower[i])) {
      feas = std::max(feas, lower[i] - lin.x[i]);
      comp = std::max(comp, std::abs((lin.x[i] - lower[i]) * mult.z_lower[i]));
    }
    if (std::isfinite(upper[i])) {
      feas = std::max(feas, lin.x[i] - upper[i]);
      comp = std::max(comp, std::abs((upper[i] - lin.x[i]) * mult.z_upper[i]));
    }
  }
  if (n) sign = std::max({sign, -mult.z_lower.minCoeff(), -mult.z_upper.minCoeff()});
  k.feasibility = feas;
  k.complementarity = std::max(comp / s_c, sign);
  return k;
}

Multipliers blend(const Multipliers& a, const Multipliers& b, double t) {
  Multipliers out;
  out.y_eq = a.y_eq + t * (b.y_eq - a.y_eq);
  out.z_in = a.z_in + t * (b.z_in - a.z_in);
  out.z_lower = a.z_lower + t * (b.z_lower - a.z_lower);
  out.z_upper = a.z_upper + t * (b.z_upper - a.z_upper);
  return out;
}

// Elastic QP: slacks p, q >= 0 on equalities (J d + c = p - q) and t >= 0 on inequalities
// (J d + c + t >= 0), each weighted by `weight` in the objective.
QpSolution solve_elastic_qp(const QpProblem& qp, double weight, const QpSettings& settings) {
  const int n = qp.num_variables();
  const int m_eq = static_cast<int>(qp.b_eq.size());
  const int m_in = static_cast<int>(qp.b_in.size());
  const int n_el = n + 2 * m_eq + m_in;
  const double inf = std::numeric_limits<double>::infinity();

  QpProblem el;
  {
    std::vector<Triplet> t;
    for (int k = 0; k < qp.H.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(qp.H, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int i = n; i < n_el; ++i) t.emplace_back(i, i, 1e-8);
    el.H.resize(n_el, n_el);
    el.H.setFromTriplets(t.begin(), t.end());
  }
  el.g = Eigen::VectorXd::Constant(n_el, weight);
  el.g.head(n) = qp.g;
  {
    std::vector<Triplet> t;
    for (int k = 0; k < qp.A_eq.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(qp.A_eq, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < m_eq; ++i) {
      t.emplace_back(i, n + i, -1.0);
      t.emplace_back(i, n + m_eq + i, 1.0);
    }
    el.A_eq.resize(m_eq, n_el);
    el.A_eq.setFromTriplets(t.begin(), t.end());
    el.b_eq = qp.b_eq;
  }
  {
    std::vector<Triplet> t;
    for (int k = 0; k < qp.A_in.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(qp.A_in, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < m_in; ++i) t.emplace_back(i, n + 2 * m_eq + i, 1.0);
    el.A_in.resize(m_in, n_el);
    el.A_in.setFromTriplets(t.begin(), t.end());
    el.b_in = qp.b_in;
  }
  el.lower = Eigen::VectorXd::Zero(n_el);
  el.upper = Eigen::VectorXd::Constant(n_el, inf);
  el.lower.head(n) = qp.lower;
  el.upper.head(n) = qp.upper;

  QpSolution sol = solve_qp(el, settings);
  QpSolution out = sol;
  if (sol.x.size() == n_el) {
    out.x = sol.x.head(n);
    out.z_lower = sol.z_lower.head(n);
    out.z_upper = sol.z_upper.head(n);
  }
  return out;
}

}  // namespace

void SolverSettings::validate() const {
  if (!(kkt_tolerance > 0.0) || max_iterations <= 0 || !(regularization_floor >= 0.0) ||
      !(penalty_growth > 1.0) || !(armijo > 0.0 && armijo < 1.0) || !(min_step_length > 0.0) ||
      !(elastic_penalty > 0.0)) {
    throw PreconditionError("invalid solver settings");
  }
  if (!(backtracking_ratio > 0.0 && backtracking_ratio < 1.0)) {
    throw PreconditionError("backtracking ratio must lie in (0, 1)");
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max_iter";
    case SolveStatus::kInfeasibleQp: return "infeasible_qp";
    case SolveStatus::kLineSearchFailure: return "line_search_failure";
  }
  return "unknown";
}

double KktResidual::scaled() const { return std::max({stationarity, feasibility, complementarity}); }

Multipliers Multipliers::zeros(const Nlp& nlp) {
  const int n = nlp.num_variables();
  return {Eigen::VectorXd::Zero(nlp.num_equalities()), Eigen::VectorXd::Zero(nlp.num_inequalities()),
          Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

Linearization linearize(const Nlp& nlp, const Eigen::VectorXd& x) {
  Linearization lin;
  lin.x = x;
  lin.f = nlp.objective(x);
  lin.grad = nlp.objective_gradient(x);
  lin.c_eq = nlp.equalities(x);
  lin.J_eq = nlp.equality_jacobian(x);
  lin.c_in = nlp.inequalities(x);
  lin.J_in = nlp.inequality_jacobian(x);
  if (lin.J_eq.rows() == 0) lin.J_eq.resize(0, x.size());
  if (lin.J_in.rows() == 0) lin.J_in.resize(0, x.size());
  return lin;
}

KktResidual kkt_residual(const Nlp& nlp, const Eigen::VectorXd& x, const Multipliers& mult) {
  return kkt_from_linearization(nlp, linearize(nlp, x), mult, nlp.lower_bounds(), nlp.upper_bounds());
}

PenaltyWeights PenaltyWeights::uniform(const Nlp& nlp, double value) {
  return {Eigen::VectorXd::Constant(nlp.num_equalities(), value),
          Eigen::VectorXd::Constant(nlp.num_inequalities(), value)};
}

double PenaltyWeights::max() const {
  double m = 0.0;
  if (eq.size()) m = std::max(m, eq.maxCoeff());
  if (in.size()) m = std::max(m, in.maxCoeff());
  return m;
}

double merit(const Nlp& nlp, const Eigen::VectorXd& x, const PenaltyWeights& penalty) {
  return nlp.objective(x) + weighted_violation(nlp.equalities(x), nlp.inequalities(x), penalty);
}

LineSearchOutcome merit_line_search(const Nlp& nlp, const Linearization& lin,
                                    const Eigen::VectorXd& step, const PenaltyWeights& penalty,
                                    const SolverSettings& settings) {
  LineSearchOutcome out;
  const double viol_now = weighted_violation(lin.c_eq, lin.c_in, penalty);
  const double viol_model =
      weighted_violation(lin.c_eq + lin.J_eq * step, lin.c_in + lin.J_in * step, penalty);
  out.directional_derivative = lin.grad.dot(step) + viol_model - viol_now;
  if (step.size() == 0 || inf_norm(step) == 0.0 || !(out.directional_derivative < 0.0)) {
    return out;
  }
  const Eigen::VectorXd lo = nlp.lower_bounds();
  const Eigen::VectorXd hi = nlp.upper_bounds();
  const double phi0 = lin.f + viol_now;
  // Merit values carry rounding error of this size; the Armijo test is relaxed by it so that
  // steps near a solution are not rejected on noise.
  const double noise = 10.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(phi0));
  double alpha = 1.0;
  while (alpha >= settings.min_step_length) {
    const Eigen::VectorXd trial = project(lin.x + alpha * step, lo, hi);
    const double phi = merit(nlp, trial, penalty);
    ++out.evaluations;
    if (std::isfinite(phi) && phi <= phi0 + settings.armijo * alpha * out.directional_derivative + noise) {
      out.accepted = true;
      out.step_length = alpha;
      out.merit = phi;
      return out;
    }
    alpha *= settings.backtracking_ratio;
  }
  return out;
}

SolveResult solve(const Nlp& nlp, const SolverSettings& settings,
                  const std::optional<WarmStart>& start) {
  settings.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int n = nlp.num_variables();
  const int m_eq = nlp.num_equalities();
  const int m_in = nlp.num_inequalities();
  const Eigen::VectorXd lo = nlp.lower_bounds();
  const Eigen::VectorXd hi = nlp.upper_bounds();

  SolveResult result;
  Eigen::VectorXd x = start ? start->x : nlp.initial_guess();
  if (x.size() != n) throw DimensionMismatch("warm start has the wrong dimension");
  x = project(x, lo, hi);
  Multipliers mult = start ? start->multipliers : Multipliers::zeros(nlp);
  if (mult.y_eq.size() != m_eq || mult.z_in.size() != m_in || mult.z_lower.size() != n ||
      mult.z_upper.size() != n) {
    throw DimensionMismatch("warm-start multipliers have the wrong dimension");
  }

  PenaltyWeights penalty = PenaltyWeights::uniform(nlp, 0.0);
  double lambda_last = 0.0;
  Eigen::MatrixXd bfgs;
  if (settings.hessian_mode == HessianMode::kDampedBfgs) bfgs = Eigen::MatrixXd::Identity(n, n);
  std::optional<Linearization> previous;
  Eigen::VectorXd previous_step;

  auto lagrangian_gradient = [&](const Linearization& l, const Multipliers& mu) {
    Eigen::VectorXd r = l.grad;
    if (m_eq) r -= l.J_eq.transpose() * mu.y_eq;
    if (m_in) r -= l.J_in.transpose() * mu.z_in;
    return r;
  };

  result.status = SolveStatus::kMaxIterations;
  int iter = 0;
  for (;; ++iter) {
    Linearization lin = linearize(nlp, x);
    if (!std::isfinite(lin.f) || !lin.grad.allFinite()) {
      result.status = SolveStatus::kLineSearchFailure;
      break;
    }
    if (previous && settings.hessian_mode == HessianMode::kDampedBfgs) {
      damped_bfgs_update(bfgs, lin.x - previous->x,
                         lagrangian_gradient(lin, mult) - lagrangian_gradient(*previous, mult));
    }

    const KktResidual kkt = kkt_from_linearization(nlp, lin, mult, lo, hi);
    result.stats.kkt_residual = kkt.scaled();
    if (settings.verbose) {
      std::fprintf(stderr, "sqp %3d  f=% .10e  stat=%.2e  feas=%.2e  comp=%.2e  pen=%.2e\n", iter,
                   lin.f, kkt.stationarity, kkt.feasibility, kkt.complementarity, penalty.max());
    }
    if (kkt.scaled() <= settings.kkt_tolerance) {
      result.status = SolveStatus::kConverged;
      break;
    }
    if (iter >= settings.max_iterations) {
      result.status = SolveStatus::kMaxIterations;
      break;
    }

    SparseMatrix H = settings.hessian_mode == HessianMode::kDampedBfgs
                         ? SparseMatrix(bfgs.sparseView())
                         : nlp.lagrangian_hessian(x, mult.y_eq, mult.z_in);
    double lambda = settings.regularization_floor;
    if (!inertia_correct(H, lin.J_eq, lambda)) {
      lambda = lambda_last == 0.0 ? 1e-4 : std::max(settings.regularization_floor, lambda_last / 3.0);
      while (!inertia_correct(H, lin.J_eq, lambda)) {
        lambda *= 8.0;
        if (lambda > 1e20) throw Error("Hessian regularization failed");
      }
      lambda_last = lambda;
    }
    H = add_diagonal(H, lambda);

    QpProblem qp;
    qp.H = H;
    qp.g = lin.grad;
    qp.A_eq = lin.J_eq;
    qp.b_eq = -lin.c_eq;
    qp.A_in = lin.J_in;
    qp.b_in = -lin.c_in;
    qp.lower = lo - x;
    qp.upper = hi - x;
    QpSolution qs = solve_qp(qp, settings.qp);
    result.stats.qp_iterations += qs.iterations;
    bool elastic = false;
    if (qs.status != QpStatus::kSolved) {
      const double weight = std::max(settings.elastic_penalty, 10.0 * penalty.max());
      qs = solve_elastic_qp(qp, weight, settings.qp);
      result.stats.qp_iterations += qs.iterations;
      ++result.stats.elastic_steps;
      elastic = true;
      if (qs.status != QpStatus::kSolved) {
        result.status = SolveStatus::kInfeasibleQp;
        break;
      }
    }
    const Eigen::VectorXd& d = qs.x;
    Multipliers qp_mult{qs.y_eq, qs.z_in, qs.z_lower, qs.z_upper};

    // Powell's update keeps every weight above its multiplier; if the model still predicts
    // too little decrease, all weights are raised uniformly.
    for (int i = 0; i < m_eq; ++i) {
      const double lam = std::abs(qp_mult.y_eq[i]);
      penalty.eq[i] = std::max(lam, 0.5 * (penalty.eq[i] + lam));
    }
    for (int i = 0; i < m_in; ++i) {
      const double lam = std::abs(qp_mult.z_in[i]);
      penalty.in[i] = std::max(lam, 0.5 * (penalty.in[i] + lam));
    }
    if (elastic) {
      penalty.eq = penalty.eq.cwiseMax(settings.elastic_penalty);
      penalty.in = penalty.in.cwiseMax(settings.elastic_penalty);
    }
    {
      const PenaltyWeights unit = PenaltyWeights::uniform(nlp, 1.0);
      const double drop = weighted_violation(lin.c_eq, lin.c_in, unit) -
                          weighted_violation(lin.c_eq + lin.J_eq * d, lin.c_in + lin.J_in * d, unit);
      const double slope = lin.grad.dot(d) + weighted_violation(lin.c_eq + lin.J_eq * d, lin.c_in + lin.J_in * d, penalty) -
                           weighted_violation(lin.c_eq, lin.c_in, penalty);
      const double wanted = -0.5 * std::max(0.0, d.dot(H * d));
      if (slope > wanted && drop > 1e-12) {
        const double kappa = settings.penalty_growth * (slope - wanted) / drop;
        penalty.eq.array() += kappa;
        penalty.in.array() += kappa;
      }
    }

    if (inf_norm(d) <= 1e-14 * (1.0 + inf_norm(x))) {
      mult = qp_mult;
      previous.reset();
      continue;
    }

    const LineSearchOutcome ls = merit_line_search(nlp, lin, d, penalty, settings);
    if (!ls.accepted) {
      if (settings.verbose) {
        std::fprintf(stderr, "sqp line search failed: slope=%.3e |d|=%.3e\n",
                     ls.directional_derivative, inf_norm(d));
      }
      result.status = SolveStatus::kLineSearchFailure;
      break;
    }
    if (settings.verbose) {
      std::fprintf(stderr, "    step=%.3e  |d|=%.3e  lambda=%.1e  qp_it=%d  elastic=%d\n", ls.step_length,
                   inf_norm(d), lambda, qs.iterations, elastic ? 1 : 0);
    }
    previous = std::move(lin);
    x = project(x + ls.step_length * d, lo, hi);
    mult = blend(mult, qp_mult, ls.step_length);
  }

  result.x = x;
  result.multipliers = mult;
  result.objective = nlp.objective(x);
  result.stats.iterations = iter;
  result.stats.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace shipdock
