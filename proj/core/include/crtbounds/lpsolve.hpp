#pragma once

#include <Eigen/Dense>

#include "crtbounds/model.hpp"

namespace crtb {

// Equality-form LP: optimize c'x subject to A x = b, x >= 0.
struct LinearProgram {
  enum Sense { MIN, MAX };
  Eigen::VectorXd c;
  Sense sense = MIN;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

struct LpSolution {
  enum Status { OPTIMAL, INFEASIBLE, UNBOUNDED };
  Status status = INFEASIBLE;
  Eigen::VectorXd x;
  double objective_value = 0.0;
};

// Drops numerically dependent rows (pivot threshold 1e-9); contradictory
// dependent rows short-circuit to INFEASIBLE via the returned flag.
struct PresolveResult {
  LinearProgram lp;
  bool infeasible = false;
  std::vector<int> kept_rows;
};

PresolveResult presolve(const LinearProgram& lp);

// Two-phase primal simplex with Bland's rule; iteration cap 50,000.
LpSolution solve(const LinearProgram& lp);

}  // namespace crtb
