#pragma once

// Constrained test problems with published solutions (Hock and Schittkowski numbering where
// a problem comes from that collection).

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shipdock/nlp.hpp"

namespace shipdock::testing {

struct AnalyticProblem {
  std::string name;
  FunctionNlp nlp;
  Eigen::VectorXd solution;
  double optimal_value;
};

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Eigen::MatrixXd mat(int rows, int cols, std::initializer_list<double> v) {
  Eigen::MatrixXd out(rows, cols);
  int i = 0;
  for (double x : v) {
    out(i / cols, i % cols) = x;
    ++i;
  }
  return out;
}

inline std::vector<AnalyticProblem> analytic_problems() {
  using V = Eigen::VectorXd;
  using M = Eigen::MatrixXd;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<AnalyticProblem> out;

  {  // HS1: Rosenbrock with x2 >= -1.5.
    FunctionNlp p(2);
    p.set_objective([](const V& x) { return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2); },
                    [](const V& x) {
                      return vec({-400 * x[0] * (x[1] - x[0] * x[0]) - 2 * (1 - x[0]),
                                  200 * (x[1] - x[0] * x[0])});
                    })
        .set_hessian([](const V& x, const V&, const V&) {
          return mat(2, 2, {1200 * x[0] * x[0] - 400 * x[1] + 2, -400 * x[0], -400 * x[0], 200});
        })
        .set_bounds(vec({-inf, -1.5}), vec({inf, inf}))
        .set_initial_guess(vec({-2, 1}));
    out.push_back({"hs1", p, vec({1, 1}), 0.0});
  }
  {  // HS6
    FunctionNlp p(2);
    p.set_objective([](const V& x) { return std::pow(1 - x[0], 2); },
                    [](const V& x) { return vec({-2 * (1 - x[0]), 0}); })
        .set_equalities(1, [](const V& x) { return vec({10 * (x[1] - x[0] * x[0])}); },
                        [](const V& x) { return mat(1, 2, {-20 * x[0], 10}); })
        .set_hessian([](const V&, const V& y, const V&) { return mat(2, 2, {2 + 20 * y[0], 0, 0, 0}); })
        .set_initial_guess(vec({-1.2, 1}));
    out.push_back({"hs6", p, vec({1, 1}), 0.0});
  }
  {  // HS7
    FunctionNlp p(2);
    p.set_objective([](const V& x) { return std::log(1 + x[0] * x[0]) - x[1]; },
                    [](const V& x) { return vec({2 * x[0] / (1 + x[0] * x[0]), -1}); })
        .set_equalities(1,
                        [](const V& x) { return vec({std::pow(1 + x[0] * x[0], 2) + x[1] * x[1] - 4}); },
                        [](const V& x) { return mat(1, 2, {4 * x[0] * (1 + x[0] * x[0]), 2 * x[1]}); })
        .set_hessian([](const V& x, const V& y, const V&) {
          const double s = 1 + x[0] * x[0];
          const double f00 = (2 * s - 4 * x[0] * x[0]) / (s * s);
          const double c00 = 4 + 12 * x[0] * x[0];
          return mat(2, 2, {f00 - y[0] * c00, 0, 0, -2 * y[0]});
        })
        .set_initial_guess(vec({2, 2}));
    out.push_back({"hs7", p, vec({0, std::sqrt(3.0)}), -std::sqrt(3.0)});
  }
  {  // HS14
    FunctionNlp p(2);
    p.set_objective([](const V& x) { return std::pow(x[0] - 2, 2) + std::pow(x[1] - 1, 2); },
                    [](const V& x) { return vec({2 * (x[0] - 2), 2 * (x[1] - 1)}); })
        .set_equalities(1, [](const V& x) { return vec({x[0] - 2 * x[1] + 1}); },
                        [](const V&) { return mat(1, 2, {1, -2}); })
        .set_inequalities(1, [](const V& x) { return vec({-x[0] * x[0] / 4 - x[1] * x[1] + 1}); },
                          [](const V& x) { return mat(1, 2, {-x[0] / 2, -2 * x[1]}); })
        .set_hessian([](const V&, const V&, const V& z) {
          return mat(2, 2, {2 + z[0] / 2, 0, 0, 2 + 2 * z[0]});
        })
        .set_initial_guess(vec({2, 2}));
    const double s7 = std::sqrt(7.0);
    out.push_back({"hs14", p, vec({0.5 * (s7 - 1), 0.25 * (s7 + 1)}), 9 - 23 * s7 / 8});
  }
  {  // HS21
    FunctionNlp p(2);
    p.set_objective([](const V& x) { return 0.01 * x[0] * x[0] + x[1] * x[1] - 100; },
                    [](const V& x) { return vec({0.02 * x[0], 2 * x[1]}); })
        .set_inequalities(1, [](const V& x) { return vec({10 * x[0] - x[1] - 10}); },
                          [](const V&) { return mat(1, 2, {10, -1}); })
        .set_hessian([](const V&, const V&, const V&) { return mat(2, 2, {0.02, 0, 0, 2}); })
        .set_bounds(vec({2, -50}), vec({50, 50}))
        .set_initial_guess(vec({-1, -1}));
    out.push_back({"hs21", p, vec({2, 0}), -99.96});
  }
  {  // HS28
    FunctionNlp p(3);
    p.set_objective([](const V& x) { return std::pow(x[0] + x[1], 2) + std::pow(x[1] + x[2], 2); },
                    [](const V& x) {
                      return vec({2 * (x[0] + x[1]), 2 * (x[0] + x[1]) + 2 * (x[1] + x[2]), 2 * (x[1] + x[2])});
                    })
        .set_equalities(1, [](const V& x) { return vec({x[0] + 2 * x[1] + 3 * x[2] - 1}); },
                        [](const V&) { return mat(1, 3, {1, 2, 3}); })
        .set_hessian([](const V&, const V&, const V&) { return mat(3, 3, {2, 2, 0, 2, 4, 2, 0, 2, 2}); })
        .set_initial_guess(vec({-4, 1, 1}));
    out.push_back({"hs28", p, vec({0.5, -0.5, 0.5}), 0.0});
  }
  {  // HS35
    FunctionNlp p(3);
    p.set_objective(
         [](const V& x) {
           return 9 - 8 * x[0] - 6 * x[1] - 4 * x[2] + 2 * x[0] * x[0] + 2 * x[1] * x[1] + x[2] * x[2] +
                  2 * x[0] * x[1] + 2 * x[0] * x[2];
         },
         [](const V& x) {
           return vec({-8 + 4 * x[0] + 2 * x[1] + 2 * x[2], -6 + 4 * x[1] + 2 * x[0], -4 + 2 * x[2] + 2 * x[0]});
         })
        .set_inequalities(1, [](const V& x) { return vec({3 - x[0] - x[1] - 2 * x[2]}); },
                          [](const V&) { return mat(1, 3, {-1, -1, -2}); })
        .set_hessian([](const V&, const V&, const V&) { return mat(3, 3, {4, 2, 2, 2, 4, 0, 2, 0, 2}); })
        .set_bounds(vec({0, 0, 0}), vec({inf, inf, inf}))
        .set_initial_guess(vec({0.5, 0.5, 0.5}));
    out.push_back({"hs35", p, vec({4.0 / 3, 7.0 / 9, 4.0 / 9}), 1.0 / 9});
  }
  {  // HS43 (Rosen-Suzuki)
    FunctionNlp p(4);
    p.set_objective(
         [](const V& x) {
           return x[0] * x[0] + x[1] * x[1] + 2 * x[2] * x[2] + x[3] * x[3] - 5 * x[0] - 5 * x[1] - 21 * x[2] +
                  7 * x[3];
         },
         [](const V& x) { return vec({2 * x[0] - 5, 2 * x[1] - 5, 4 * x[2] - 21, 2 * x[3] + 7}); })
        .set_inequalities(
            3,
            [](const V& x) {
              return vec({8 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - x[3] * x[3] - x[0] + x[1] - x[2] + x[3],
                          10 - x[0] * x[0] - 2 * x[1] * x[1] - x[2] * x[2] - 2 * x[3] * x[3] + x[0] + x[3],
                          5 - 2 * x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - 2 * x[0] + x[1] + x[3]});
            },
            [](const V& x) {
              return mat(3, 4,
                         {-2 * x[0] - 1, -2 * x[1] + 1, -2 * x[2] - 1, -2 * x[3] + 1,  //
                          -2 * x[0] + 1, -4 * x[1], -2 * x[2], -4 * x[3] + 1,          //
                          -4 * x[0] - 2, -2 * x[1] + 1, -2 * x[2], 1});
            })
        .set_hessian([](const V&, const V&, const V& z) {
          M H = M::Zero(4, 4);
          H.diagonal() << 2, 2, 4, 2;
          H.diagonal() += 2 * z[0] * vec({1, 1, 1, 1});
          H.diagonal() += 2 * z[1] * vec({1, 2, 1, 2});
          H.diagonal() += 2 * z[2] * vec({2, 1, 1, 0});
          return H;
        })
        .set_initial_guess(vec({0, 0, 0, 0}));
    out.push_back({"hs43", p, vec({0, 1, 2, -1}), -44.0});
  }
  {  // HS48
    FunctionNlp p(5);
    p.set_objective(
         [](const V& x) { return std::pow(x[0] - 1, 2) + std::pow(x[1] - x[2], 2) + std::pow(x[3] - x[4], 2); },
         [](const V& x) {
           return vec({2 * (x[0] - 1), 2 * (x[1] - x[2]), -2 * (x[1] - x[2]), 2 * (x[3] - x[4]), -2 * (x[3] - x[4])});
         })
        .set_equalities(2, [](const V& x) { return vec({x.sum() - 5, x[2] - 2 * (x[3] + x[4]) + 3}); },
                        [](const V&) { return mat(2, 5, {1, 1, 1, 1, 1, 0, 0, 1, -2, -2}); })
        .set_hessian([](const V&, const V&, const V&) {
          return mat(5, 5, {2, 0, 0, 0, 0, 0, 2, -2, 0, 0, 0, -2, 2, 0, 0, 0, 0, 0, 2, -2, 0, 0, 0, -2, 2});
        })
        .set_initial_guess(vec({3, 5, -3, 2, -2}));
    out.push_back({"hs48", p, vec({1, 1, 1, 1, 1}), 0.0});
  }
  {  // HS71
    FunctionNlp p(4);
    p.set_objective([](const V& x) { return x[0] * x[3] * (x[0] + x[1] + x[2]) + x[2]; },
                    [](const V& x) {
                      const double s = x[0] + x[1] + x[2];
                      return vec({x[3] * s + x[0] * x[3], x[0] * x[3], x[0] * x[3] + 1, x[0] * s});
                    })
        .set_equalities(1, [](const V& x) { return vec({x.squaredNorm() - 40}); },
                        [](const V& x) { return M(2 * x.transpose()); })
        .set_inequalities(1, [](const V& x) { return vec({x.prod() - 25}); },
                          [](const V& x) {
                            return mat(1, 4, {x[1] * x[2] * x[3], x[0] * x[2] * x[3], x[0] * x[1] * x[3],
                                              x[0] * x[1] * x[2]});
                          })
        .set_hessian([](const V& x, const V& y, const V& z) {
          M H(4, 4);
          H << 2 * x[3], x[3], x[3], 2 * x[0] + x[1] + x[2],  //
              x[3], 0, 0, x[0],                               //
              x[3], 0, 0, x[0],                               //
              2 * x[0] + x[1] + x[2], x[0], x[0], 0;
          H -= 2 * y[0] * M::Identity(4, 4);
          M C(4, 4);
          C << 0, x[2] * x[3], x[1] * x[3], x[1] * x[2],  //
              x[2] * x[3], 0, x[0] * x[3], x[0] * x[2],   //
              x[1] * x[3], x[0] * x[3], 0, x[0] * x[1],   //
              x[1] * x[2], x[0] * x[2], x[0] * x[1], 0;
          H -= z[0] * C;
          return H;
        })
        .set_bounds(vec({1, 1, 1, 1}), vec({5, 5, 5, 5}))
        .set_initial_guess(vec({1, 5, 5, 1}));
    out.push_back({"hs71", p, vec({1.0, 4.7429994, 3.8211503, 1.3794082}), 17.0140173});
  }
  {  // Euclidean projection of (2, 1) onto the unit disk.
    FunctionNlp p(2);
    p.set_objective([](const V& x) { return std::pow(x[0] - 2, 2) + std::pow(x[1] - 1, 2); },
                    [](const V& x) { return vec({2 * (x[0] - 2), 2 * (x[1] - 1)}); })
        .set_inequalities(1, [](const V& x) { return vec({1 - x.squaredNorm()}); },
                          [](const V& x) { return M(-2 * x.transpose()); })
        .set_hessian([](const V&, const V&, const V& z) { return M((2 + 2 * z[0]) * M::Identity(2, 2)); })
        .set_initial_guess(vec({0, 0}));
    const double r5 = std::sqrt(5.0);
    out.push_back({"disk_projection", p, vec({2 / r5, 1 / r5}), std::pow(r5 - 1, 2)});
  }
  {  // Maximize x1 x2 on the line x1 + x2 = 2 (written as a minimization), bounded box.
    FunctionNlp p(2);
    p.set_objective([](const V& x) { return -x[0] * x[1]; }, [](const V& x) { return vec({-x[1], -x[0]}); })
        .set_equalities(1, [](const V& x) { return vec({x[0] + x[1] - 2}); },
                        [](const V&) { return mat(1, 2, {1, 1}); })
        .set_hessian([](const V&, const V&, const V&) { return mat(2, 2, {0, -1, -1, 0}); })
        .set_bounds(vec({0, 0}), vec({10, 10}))
        .set_initial_guess(vec({1.8, 0.1}));
    out.push_back({"product_on_line", p, vec({1, 1}), -1.0});
  }
  return out;
}

}  // namespace shipdock::testing
