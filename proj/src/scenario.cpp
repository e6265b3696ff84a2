#include "shipdock/scenario.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

void require_psd(const Eigen::MatrixXd& A, const char* name) {
  if (!A.allFinite() || (A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A.cwiseAbs().maxCoeff())) {
    throw PreconditionError(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * (1.0 + A.cwiseAbs().maxCoeff())) {
    throw PreconditionError(std::string(name) + " must be positive semidefinite");
  }
}

}  // namespace

void Weights::validate(int num_thrusters) const {
  require_psd(Q_eta, "Q_eta");
  require_psd(Q_nu, "Q_nu");
  if (R_f.size() != 0 && (R_f.rows() != num_thrusters || R_f.cols() != num_thrusters)) {
    throw PreconditionError("R_f must be n x n");
  }
  require_psd(thrust_weight(num_thrusters), "R_f");
  allocation.validate(num_thrusters);
}

Eigen::MatrixXd Weights::thrust_weight(int num_thrusters) const {
  if (R_f.size() == 0) return 0.01 * Eigen::MatrixXd::Identity(num_thrusters, num_thrusters);
  return R_f;
}

int Scenario::num_azimuths() const {
  return static_cast<int>(std::count_if(thrusters.begin(), thrusters.end(),
                                        [](const ThrusterSpec& s) { return s.is_azimuth(); }));
}

ConvexPolygon Scenario::safety_polygon() const {
  return dilate(convex_hull(vessel.hull_vertices), safety_margin);
}

}  // namespace shipdock
