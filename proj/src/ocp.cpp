#include "shipdock/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

using Triplet = Eigen::Triplet<double>;

Eigen::Vector3d column(const ThrusterSpec& s, double a) {
  return {std::cos(a), std::sin(a), s.lx * std::sin(a) - s.ly * std::cos(a)};
}

Eigen::Vector3d column_derivative(const ThrusterSpec& s, double a) {
  return {-std::sin(a), std::cos(a), s.lx * std::cos(a) + s.ly * std::sin(a)};
}

// Adds a dense block to a triplet list, skipping exact zeros.
void add_block(std::vector<Triplet>& t, int row, int col, const Eigen::MatrixXd& block) {
  for (int j = 0; j < block.cols(); ++j)
    for (int i = 0; i < block.rows(); ++i)
      if (block(i, j) != 0.0) t.emplace_back(row + i, col + j, block(i, j));
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

VariableScaling VariableScaling::for_thrusters(std::span<const ThrusterSpec> specs) {
  VariableScaling s;
  for (const auto& spec : specs) {
    const double fs = std::max(std::abs(spec.f_min), std::abs(spec.f_max));
    if (!(fs > 0.0)) throw PreconditionError("thruster force range must be nonzero");
    s.force.push_back(fs);
  }
  return s;
}

Vector6d VariableScaling::state() const {
  Vector6d s;
  s << position, position, angle, velocity, velocity, yaw_rate;
  return s;
}

DecisionLayout::DecisionLayout(int intervals, int degree, int num_thrusters, int num_azimuths)
    : intervals_(intervals),
      degree_(degree),
      num_thrusters_(num_thrusters),
      num_azimuths_(num_azimuths),
      stride_(6 * (degree + 1) + num_thrusters + num_azimuths) {
  if (intervals < 1 || degree < 1 || num_thrusters < 1 || num_azimuths < 0 ||
      num_azimuths > num_thrusters) {
    throw PreconditionError("invalid decision layout");
  }
}

int DecisionLayout::boundary(int k) const {
  if (k < 0 || k > intervals_) throw PreconditionError("boundary index out of range");
  return k * stride_;
}

int DecisionLayout::collocation(int k, int j) const {
  if (k < 0 || k >= intervals_ || j < 0 || j > degree_) {
    throw PreconditionError("collocation index out of range");
  }
  return k * stride_ + 6 * j;
}

int DecisionLayout::force(int k) const {
  if (k < 0 || k >= intervals_) throw PreconditionError("interval index out of range");
  return k * stride_ + 6 * (degree_ + 1);
}

int DecisionLayout::alpha(int k) const { return force(k) + num_thrusters_; }

double stage_cost(const Vector6d& state, std::span<const double> f, std::span<const double> alphas,
                  const Pose& desired, const Weights& weights, std::span<const ThrusterSpec> specs,
                  const VariableScaling& scaling) {
  const int n = static_cast<int>(specs.size());
  if (static_cast<int>(f.size()) != n || static_cast<int>(alphas.size()) != n ||
      static_cast<int>(scaling.force.size()) != n) {
    throw DimensionMismatch("stage_cost: one force and angle per thruster expected");
  }
  const Eigen::Vector3d e((state[0] - desired.x()) / scaling.position,
                          (state[1] - desired.y()) / scaling.position,
                          wrap_angle(state[2] - desired.psi()) / scaling.angle);
  const Eigen::Vector3d nu(state[3] / scaling.velocity, state[4] / scaling.velocity,
                           state[5] / scaling.yaw_rate);
  Eigen::VectorXd fs(n);
  for (int i = 0; i < n; ++i) fs[i] = f[i] / scaling.force[i];
  double cost = e.dot(weights.Q_eta * e) + nu.dot(weights.Q_nu * nu) +
                fs.dot(weights.thrust_weight(n) * fs);
  if (weights.allocation.rho != 0.0) cost += singularity_cost(specs, alphas, weights.allocation);
  return cost;
}

DockingNlp::DockingNlp(const Scenario& scenario, const InitialCondition& initial,
                       const TranscriptionOptions& options)
    : scenario_(scenario),
      initial_(initial),
      options_(options),
      grid_(legendre_grid(scenario.horizon.degree, scenario.horizon.interval_length())),
      layout_(scenario.horizon.intervals_N, scenario.horizon.degree,
              static_cast<int>(scenario.thrusters.size()), scenario.num_azimuths()),
      scaling_(VariableScaling::for_thrusters(scenario.thrusters)),
      model_(assemble_model(scenario.vessel)) {
  const int n = layout_.num_thrusters();
  if (static_cast<int>(initial_.alpha.size()) != n) {
    throw DimensionMismatch("initial condition needs one angle per thruster");
  }
  scenario_.weights.validate(n);
  for (int i = 0; i < n; ++i) {
    scenario_.thrusters[i].validate();
    if (scenario_.thrusters[i].is_azimuth()) {
      azimuth_index_.push_back(i);
    } else {
      initial_.alpha[i] = scenario_.thrusters[i].alpha_fixed;
    }
  }
  R_f_ = scenario_.weights.thrust_weight(n);

  const double inf = std::numeric_limits<double>::infinity();
  lower_ = Eigen::VectorXd::Constant(layout_.dimension(), -inf);
  upper_ = Eigen::VectorXd::Constant(layout_.dimension(), inf);
  for (int k = 0; k < layout_.intervals(); ++k) {
    for (int i = 0; i < n; ++i) {
      const auto& s = scenario_.thrusters[i];
      lower_[layout_.force(k) + i] = s.f_min / scaling_.force[i];
      upper_[layout_.force(k) + i] = s.f_max / scaling_.force[i];
    }
    for (int a = 0; a < layout_.num_azimuths(); ++a) {
      const auto& s = scenario_.thrusters[azimuth_index_[a]];
      lower_[layout_.alpha(k) + a] = s.alpha_min / scaling_.angle;
      upper_[layout_.alpha(k) + a] = s.alpha_max / scaling_.angle;
    }
  }

  if (scenario_.region) {
    halfspaces_ = to_halfspaces(*scenario_.region);
    safety_points_ = scenario_.safety_polygon().vertices();
    const Vector6d& z = initial_.state;
    const Eigen::MatrixXd r =
        containment_residuals(halfspaces_, Pose(z[0], z[1], z[2]), safety_points_);
    if (r.minCoeff() < 0.0) {
      warnings_.push_back("initial safety polygon leaves the operating region by " +
                          std::to_string(-r.minCoeff()) + " m");
    }
  }
  for (int a = 0; a < layout_.num_azimuths(); ++a) {
    const auto& s = scenario_.thrusters[azimuth_index_[a]];
    const double alpha0 = initial_.alpha[azimuth_index_[a]];
    if (alpha0 < s.alpha_min - 1e-9 || alpha0 > s.alpha_max + 1e-9) {
      warnings_.push_back("initial azimuth angle " + std::to_string(a + 1) + " outside its sector");
    }
  }
}

int DockingNlp::containment_rows_per_point() const {
  return static_cast<int>(halfspaces_.size() * safety_points_.size());
}

int DockingNlp::num_equalities() const {
  return 6 + layout_.intervals() * 6 * (layout_.degree() + 1);
}

int DockingNlp::num_inequalities() const {
  const int N = layout_.intervals();
  const int d = layout_.degree();
  const int points = N * d + N;  // collocation states, boundaries 1..N
  return points * containment_rows_per_point() + N * 2 * layout_.num_azimuths();
}

Eigen::VectorXd DockingNlp::initial_guess() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(layout_.dimension());
  const Vector6d s0 = initial_.state.cwiseQuotient(scaling_.state());
  for (int k = 0; k < layout_.intervals(); ++k) {
    for (int j = 0; j <= layout_.degree(); ++j) x.segment<6>(layout_.collocation(k, j)) = s0;
    for (int a = 0; a < layout_.num_azimuths(); ++a) {
      x[layout_.alpha(k) + a] = std::clamp(initial_.alpha[azimuth_index_[a]] / scaling_.angle,
                                           lower_[layout_.alpha(k) + a],
                                           upper_[layout_.alpha(k) + a]);
    }
  }
  x.segment<6>(layout_.boundary(layout_.intervals())) = s0;
  for (int i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower_[i], upper_[i]);
  return x;
}

Vector6d DockingNlp::node_state(const Eigen::VectorXd& x, int k, int j) const {
  const int idx = k == layout_.intervals() ? layout_.boundary(k) : layout_.collocation(k, j);
  return x.segment<6>(idx).cwiseProduct(scaling_.state());
}

Eigen::VectorXd DockingNlp::control_alphas(const Eigen::VectorXd& x, int k) const {
  Eigen::VectorXd alphas(layout_.num_thrusters());
  for (int i = 0; i < layout_.num_thrusters(); ++i) alphas[i] = scenario_.thrusters[i].alpha_fixed;
  for (int a = 0; a < layout_.num_azimuths(); ++a) {
    alphas[azimuth_index_[a]] = x[layout_.alpha(k) + a] * scaling_.angle;
  }
  return alphas;
}

ThrusterCommand DockingNlp::command(const Eigen::VectorXd& x, int k) const {
  ThrusterCommand c;
  const Eigen::VectorXd alphas = control_alphas(x, k);
  c.alpha.assign(alphas.data(), alphas.data() + alphas.size());
  for (int i = 0; i < layout_.num_thrusters(); ++i) {
    c.f.push_back(x[layout_.force(k) + i] * scaling_.force[i]);
  }
  return c;
}

// Weighted stage cost of node (k, j) with the controls of interval min(k, N - 1); the gradient
// (if requested) is accumulated in scaled variables.
double DockingNlp::node_cost(const Eigen::VectorXd& x, int k, int j, double weight,
                             Eigen::VectorXd* grad) const {
  const int N = layout_.intervals();
  const int n = layout_.num_thrusters();
  const int ku = std::min(k, N - 1);
  const int si = k == N ? layout_.boundary(N) : layout_.collocation(k, j);
  const auto s = x.segment<6>(si);
  const Pose& d = scenario_.desired;
  const Weights& w = scenario_.weights;

  const Eigen::Vector3d e(s[0] - d.x() / scaling_.position, s[1] - d.y() / scaling_.position,
                          wrap_angle(s[2] * scaling_.angle - d.psi()) / scaling_.angle);
  const Eigen::Vector3d nu = s.tail<3>();
  const Eigen::VectorXd f = x.segment(layout_.force(ku), n);
  const Eigen::Vector3d Qe = w.Q_eta * e;
  const Eigen::Vector3d Qn = w.Q_nu * nu;
  const Eigen::VectorXd Rf = R_f_ * f;
  double cost = e.dot(Qe) + nu.dot(Qn) + f.dot(Rf);

  const Eigen::VectorXd alphas = control_alphas(x, ku);
  SingularityDerivatives sing;
  const bool has_sing = w.allocation.rho != 0.0;
  if (has_sing) {
    sing = singularity_cost_derivatives(
        scenario_.thrusters, std::span<const double>(alphas.data(), alphas.size()), w.allocation);
    cost += sing.value;
  }
  if (grad) {
    grad->segment<3>(si) += weight * 2.0 * Qe;
    grad->segment<3>(si + 3) += weight * 2.0 * Qn;
    grad->segment(layout_.force(ku), n) += weight * 2.0 * Rf;
    if (has_sing) {
      for (int a = 0; a < layout_.num_azimuths(); ++a) {
        (*grad)[layout_.alpha(ku) + a] += weight * scaling_.angle * sing.gradient[azimuth_index_[a]];
      }
    }
  }
  return weight * cost;
}

double DockingNlp::objective(const Eigen::VectorXd& x) const {
  const int N = layout_.intervals();
  const double h = grid_.h * options_.objective_scale;
  double total = 0.0;
  for (int k = 0; k < N; ++k)
    for (int j = 0; j <= layout_.degree(); ++j) total += node_cost(x, k, j, h * grid_.quad_weights[j], nullptr);
  total += node_cost(x, N, 0, h, nullptr);
  return total;
}

Eigen::VectorXd DockingNlp::objective_gradient(const Eigen::VectorXd& x) const {
  const int N = layout_.intervals();
  const double h = grid_.h * options_.objective_scale;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (int k = 0; k < N; ++k)
    for (int j = 0; j <= layout_.degree(); ++j) node_cost(x, k, j, h * grid_.quad_weights[j], &g);
  node_cost(x, N, 0, h, &g);
  return g;
}

Eigen::VectorXd DockingNlp::equalities(const Eigen::VectorXd& x) const {
  const int N = layout_.intervals();
  const int d = layout_.degree();
  const int n = layout_.num_thrusters();
  const Vector6d S = scaling_.state();
  Eigen::VectorXd c(num_equalities());
  c.head<6>() = x.segment<6>(layout_.boundary(0)) - initial_.state.cwiseQuotient(S);
  int row = 6;
  for (int k = 0; k < N; ++k) {
    const ThrusterCommand cmd = command(x, k);
    Eigen::Vector3d tau = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) tau += column(scenario_.thrusters[i], cmd.alpha[i]) * cmd.f[i];
    for (int c_idx = 1; c_idx <= d; ++c_idx) {
      Vector6d r = Vector6d::Zero();
      for (int j = 0; j <= d; ++j) r += grid_.diff_matrix(j, c_idx) * x.segment<6>(layout_.collocation(k, j));
      const Vector6d xdot = dynamics(node_state(x, k, c_idx), tau, model_);
      r -= grid_.h * xdot.cwiseQuotient(S);
      c.segment<6>(row) = r;
      row += 6;
    }
    Vector6d cont = -x.segment<6>(layout_.boundary(k + 1));
    for (int j = 0; j <= d; ++j) cont += grid_.end_weights[j] * x.segment<6>(layout_.collocation(k, j));
    c.segment<6>(row) = cont;
    row += 6;
  }
  return c;
}

SparseMatrix DockingNlp::equality_jacobian(const Eigen::VectorXd& x) const {
  const int N = layout_.intervals();
  const int d = layout_.degree();
  const int n = layout_.num_thrusters();
  const Vector6d S = scaling_.state();
  const Eigen::Matrix<double, 6, 6> S_inv = S.cwiseInverse().asDiagonal();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(N) * d * (6 * (d + 1) + 36 + 6 * (n + 2)) + 64 * N);
  for (int i = 0; i < 6; ++i) t.emplace_back(i, layout_.boundary(0) + i, 1.0);
  int row = 6;
  for (int k = 0; k < N; ++k) {
    const ThrusterCommand cmd = command(x, k);
    for (int c_idx = 1; c_idx <= d; ++c_idx) {
      for (int j = 0; j <= d; ++j) {
        const double D = grid_.diff_matrix(j, c_idx);
        if (j == c_idx) continue;
        for (int i = 0; i < 6; ++i) t.emplace_back(row + i, layout_.collocation(k, j) + i, D);
      }
      const Matrix6d A = dynamics_state_jacobian(node_state(x, k, c_idx), model_);
      Matrix6d block = -grid_.h * S_inv * A * S.asDiagonal();
      block.diagonal().array() += grid_.diff_matrix(c_idx, c_idx);
      add_block(t, row, layout_.collocation(k, c_idx), block);
      for (int i = 0; i < n; ++i) {
        const auto& spec = scenario_.thrusters[i];
        const Eigen::Vector3d col =
            -grid_.h * S_inv.bottomRightCorner<3, 3>() * model_.M_inv * column(spec, cmd.alpha[i]) * scaling_.force[i];
        add_block(t, row + 3, layout_.force(k) + i, col);
      }
      for (int a = 0; a < layout_.num_azimuths(); ++a) {
        const int i = azimuth_index_[a];
        const Eigen::Vector3d col = -grid_.h * S_inv.bottomRightCorner<3, 3>() * model_.M_inv *
                                    column_derivative(scenario_.thrusters[i], cmd.alpha[i]) *
                                    cmd.f[i] * scaling_.angle;
        add_block(t, row + 3, layout_.alpha(k) + a, col);
      }
      row += 6;
    }
    for (int j = 0; j <= d; ++j)
      for (int i = 0; i < 6; ++i) t.emplace_back(row + i, layout_.collocation(k, j) + i, grid_.end_weights[j]);
    for (int i = 0; i < 6; ++i) t.emplace_back(row + i, layout_.boundary(k + 1) + i, -1.0);
    row += 6;
  }
  return from_triplets(num_equalities(), layout_.dimension(), t);
}

Eigen::VectorXd DockingNlp::inequalities(const Eigen::VectorXd& x) const {
  const int N = layout_.intervals();
  const int d = layout_.degree();
  const int rows_pp = containment_rows_per_point();
  Eigen::VectorXd c(num_inequalities());
  int row = 0;
  auto containment = [&](const Vector6d& z) {
    if (rows_pp == 0) return;
    const Eigen::MatrixXd r = containment_residuals(halfspaces_, Pose(z[0], z[1], z[2]), safety_points_);
    for (int p = 0; p < r.rows(); ++p)
      for (int h = 0; h < r.cols(); ++h) c[row++] = r(p, h) / scaling_.position;
  };
  for (int k = 0; k < N; ++k) {
    for (int j = (k == 0 ? 1 : 0); j <= d; ++j) containment(node_state(x, k, j));
    for (int a = 0; a < layout_.num_azimuths(); ++a) {
      const auto& s = scenario_.thrusters[azimuth_index_[a]];
      const double limit = s.alpha_rate_max * grid_.h / scaling_.angle;
      const double prev = k == 0 ? initial_.alpha[azimuth_index_[a]] / scaling_.angle
                                 : x[layout_.alpha(k - 1) + a];
      const double delta = x[layout_.alpha(k) + a] - prev;
      c[row++] = limit - delta;
      c[row++] = limit + delta;
    }
  }
  containment(node_state(x, N, 0));
  return c;
}

SparseMatrix DockingNlp::inequality_jacobian(const Eigen::VectorXd& x) const {
  const int N = layout_.intervals();
  const int d = layout_.degree();
  const int rows_pp = containment_rows_per_point();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(num_inequalities()) * 3);
  int row = 0;
  auto containment = [&](int index) {
    if (rows_pp == 0) return;
    const double psi = x[index + 2] * scaling_.angle;
    Eigen::Matrix2d dR;
    dR << -std::sin(psi), -std::cos(psi), std::cos(psi), -std::sin(psi);
    for (const Point2& p : safety_points_) {
      const Point2 dp = dR * p;
      for (const auto& h : halfspaces_.rows) {
        t.emplace_back(row, index, -h.a[0]);
        t.emplace_back(row, index + 1, -h.a[1]);
        t.emplace_back(row, index + 2, -h.a.dot(dp) * scaling_.angle / scaling_.position);
        ++row;
      }
    }
  };
  for (int k = 0; k < N; ++k) {
    for (int j = (k == 0 ? 1 : 0); j <= d; ++j) containment(layout_.collocation(k, j));
    for (int a = 0; a < layout_.num_azimuths(); ++a) {
      t.emplace_back(row, layout_.alpha(k) + a, -1.0);
      if (k > 0) t.emplace_back(row, layout_.alpha(k - 1) + a, 1.0);
      ++row;
      t.emplace_back(row, layout_.alpha(k) + a, 1.0);
      if (k > 0) t.emplace_back(row, layout_.alpha(k - 1) + a, -1.0);
      ++row;
    }
  }
  containment(layout_.boundary(N));
  return from_triplets(num_inequalities(), layout_.dimension(), t);
}

SparseMatrix DockingNlp::lagrangian_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                                            const Eigen::VectorXd& z_in) const {
  return hessian(x, y_eq, z_in, options_.exact_hessian);
}

SparseMatrix DockingNlp::hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                                 const Eigen::VectorXd& z_in, bool exact) const {
  const int N = layout_.intervals();
  const int d = layout_.degree();
  const int n_az = layout_.num_azimuths();
  const Weights& w = scenario_.weights;
  const double h_obj = grid_.h * options_.objective_scale;
  std::vector<Triplet> t;

  Eigen::MatrixXd state_block = Eigen::MatrixXd::Zero(6, 6);
  state_block.topLeftCorner<3, 3>() = 2.0 * w.Q_eta;
  state_block.bottomRightCorner<3, 3>() = 2.0 * w.Q_nu;

  // Tracking and effort terms.
  for (int k = 0; k <= N; ++k) {
    const int last = k == N ? 0 : d;
    for (int j = 0; j <= last; ++j) {
      const double weight = k == N ? h_obj : h_obj * grid_.quad_weights[j];
      const int si = k == N ? layout_.boundary(N) : layout_.collocation(k, j);
      add_block(t, si, si, weight * state_block);
    }
  }
  // Per-interval control block over (f, alpha); force(k) and alpha(k) are adjacent.
  const int n_f = static_cast<int>(scenario_.thrusters.size());
  std::vector<Eigen::MatrixXd> control(N, Eigen::MatrixXd::Zero(n_f + n_az, n_f + n_az));
  for (int k = 0; k < N; ++k) {
    // Interval weights sum to h; the last interval also carries the terminal node.
    const double weight = h_obj * (k == N - 1 ? 2.0 : 1.0);
    control[k].topLeftCorner(n_f, n_f) = weight * 2.0 * R_f_;
    if (w.allocation.rho != 0.0 && n_az > 0) {
      const Eigen::VectorXd alphas = control_alphas(x, k);
      const SingularityDerivatives sing = singularity_cost_derivatives(
          scenario_.thrusters, std::span<const double>(alphas.data(), alphas.size()), w.allocation);
      const double s2 = weight * scaling_.angle * scaling_.angle;
      for (int a = 0; a < n_az; ++a)
        for (int b = 0; b < n_az; ++b)
          control[k](n_f + a, n_f + b) = s2 * sing.hessian(azimuth_index_[a], azimuth_index_[b]);
    }
  }

  // Constraint curvature: the kinematic rotation, the thrust mapping (exact only) and the
  // heading dependence of the containment rows.
  const double pi_s = scaling_.angle;
  const double pos = scaling_.position;
  const Eigen::Vector3d nu_scale(scaling_.velocity, scaling_.velocity, scaling_.yaw_rate);
  int row = 6;
  for (int k = 0; k < N; ++k) {
    const ThrusterCommand cmd = command(x, k);
    for (int c_idx = 1; c_idx <= d; ++c_idx) {
      const int si = layout_.collocation(k, c_idx);
      const Eigen::Ref<const Eigen::VectorXd> y = y_eq.segment(row, 6);
      // L gets -y . c and c contains -h S^-1 F, so the curvature enters as +h y . d2(S^-1 F).
      const double psi = x[si + 2] * pi_s;
      const double u = x[si + 3] * scaling_.velocity;
      const double v = x[si + 4] * scaling_.velocity;
      const double cs = std::cos(psi), sn = std::sin(psi);
      const double k0 = grid_.h * y[0] / pos;
      const double k1 = grid_.h * y[1] / pos;
      const double pp = k0 * (-pi_s * pi_s * (u * cs - v * sn)) + k1 * (-pi_s * pi_s * (u * sn + v * cs));
      const double pu = (k0 * (-pi_s * sn) + k1 * (pi_s * cs)) * scaling_.velocity;
      const double pv = (k0 * (-pi_s * cs) + k1 * (-pi_s * sn)) * scaling_.velocity;
      t.emplace_back(si + 2, si + 2, pp);
      t.emplace_back(si + 2, si + 3, pu);
      t.emplace_back(si + 3, si + 2, pu);
      t.emplace_back(si + 2, si + 4, pv);
      t.emplace_back(si + 4, si + 2, pv);
      const Eigen::Vector3d y_nu = grid_.h * y.tail<3>().cwiseQuotient(nu_scale);
      const Eigen::Vector3d g = model_.M_inv.transpose() * y_nu;
      for (int a = 0; a < (exact ? n_az : 0); ++a) {
        const int i = azimuth_index_[a];
        const auto& spec = scenario_.thrusters[i];
        const double af = g.dot(column_derivative(spec, cmd.alpha[i])) * scaling_.force[i] * pi_s;
        const double aa = -g.dot(column(spec, cmd.alpha[i])) * cmd.f[i] * pi_s * pi_s;
        control[k](n_f + a, i) += af;
        control[k](i, n_f + a) += af;
        control[k](n_f + a, n_f + a) += aa;
      }
      row += 6;
    }
    row += 6;
  }
  if (containment_rows_per_point() > 0) {
    int crow = 0;
    auto containment = [&](int index) {
      const double psi = x[index + 2] * pi_s;
      const Eigen::Matrix2d R = rotation_planar(psi);
      double acc = 0.0;
      for (const Point2& p : safety_points_) {
        const Point2 rp = R * p;
        for (const auto& hs : halfspaces_.rows) acc += z_in[crow++] * hs.a.dot(rp);
      }
      // c'' = pi^2 a . R p / pos, contribution -z c''.
      t.emplace_back(index + 2, index + 2, -acc * pi_s * pi_s / pos);
    };
    for (int k = 0; k < N; ++k) {
      for (int j = (k == 0 ? 1 : 0); j <= d; ++j) containment(layout_.collocation(k, j));
      crow += 2 * n_az;
    }
    containment(layout_.boundary(N));
  }
  for (int k = 0; k < N; ++k) {
    if (!exact) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(control[k]);
      control[k] = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
                   eig.eigenvectors().transpose();
    }
    add_block(t, layout_.force(k), layout_.force(k), control[k]);
  }
  return from_triplets(layout_.dimension(), layout_.dimension(), t);
}

double DockingNlp::min_containment_residual(const Eigen::VectorXd& x) const {
  double best = std::numeric_limits<double>::infinity();
  if (containment_rows_per_point() == 0) return best;
  for (int k = 0; k <= layout_.intervals(); ++k) {
    const int last = k == layout_.intervals() ? 0 : layout_.degree();
    for (int j = 0; j <= last; ++j) {
      const Vector6d z = node_state(x, k, j);
      best = std::min(best, containment_residuals(halfspaces_, Pose(z[0], z[1], z[2]), safety_points_).minCoeff());
    }
  }
  return best;
}

std::vector<TrajectoryPoint> extract_trajectory(const DockingNlp& nlp, const Eigen::VectorXd& x) {
  const DecisionLayout& L = nlp.layout();
  if (x.size() != L.dimension()) throw DimensionMismatch("solution vector has the wrong dimension");
  std::vector<TrajectoryPoint> out;
  out.reserve(L.intervals() + 1);
  for (int k = 0; k <= L.intervals(); ++k) {
    const Vector6d z = nlp.boundary_state(x, k);
    TrajectoryPoint p;
    p.t = k * nlp.grid().h;
    p.pose = Pose(z[0], z[1], z[2]);
    p.velocity = {z[3], z[4], z[5]};
    p.command = nlp.command(x, std::min(k, L.intervals() - 1));
    out.push_back(std::move(p));
  }
  return out;
}

Eigen::VectorXd pack_solution(const DockingNlp& nlp, const std::vector<Vector6d>& boundary,
                              const std::vector<ThrusterCommand>& commands,
                              const std::vector<std::vector<Vector6d>>& collocation) {
  const DecisionLayout& L = nlp.layout();
  const int N = L.intervals();
  const int d = L.degree();
  if (static_cast<int>(boundary.size()) != N + 1 || static_cast<int>(commands.size()) != N ||
      (!collocation.empty() && static_cast<int>(collocation.size()) != N)) {
    throw DimensionMismatch("pack_solution: wrong number of states or commands");
  }
  const Vector6d S = nlp.scaling().state();
  const auto& specs = nlp.scenario().thrusters;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(L.dimension());
  for (int k = 0; k <= N; ++k) x.segment<6>(L.boundary(k)) = boundary[k].cwiseQuotient(S);
  for (int k = 0; k < N; ++k) {
    for (int j = 1; j <= d; ++j) {
      Vector6d z;
      if (!collocation.empty()) {
        if (static_cast<int>(collocation[k].size()) != d) throw DimensionMismatch("pack_solution: collocation states");
        z = collocation[k][j - 1];
      } else {
        const double tau = nlp.grid().nodes[j];
        z = (1.0 - tau) * boundary[k] + tau * boundary[k + 1];
      }
      x.segment<6>(L.collocation(k, j)) = z.cwiseQuotient(S);
    }
    const ThrusterCommand& c = commands[k];
    if (static_cast<int>(c.f.size()) != L.num_thrusters() ||
        static_cast<int>(c.alpha.size()) != L.num_thrusters()) {
      throw DimensionMismatch("pack_solution: command size");
    }
    int a = 0;
    for (int i = 0; i < L.num_thrusters(); ++i) {
      x[L.force(k) + i] = c.f[i] / nlp.scaling().force[i];
      if (specs[i].is_azimuth()) x[L.alpha(k) + a++] = c.alpha[i] / nlp.scaling().angle;
    }
  }
  return x;
}

}  // namespace shipdock
