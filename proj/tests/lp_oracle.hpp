#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "crtbounds/lpsolve.hpp"

namespace testutil {

// Brute-force LP oracle: enumerate all basic solutions (column subsets of
// size = rows), keep the feasible ones, and take the best objective. Only
// viable for small instances.
inline std::optional<double> vertex_optimum(const crtb::LinearProgram& lp) {
  const int m = static_cast<int>(lp.a.rows());
  const int n = static_cast<int>(lp.a.cols());
  const double sign =
      lp.sense == crtb::LinearProgram::Sense::MIN ? 1.0 : -1.0;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;

  std::vector<int> pick(m);
  // iterate over all m-combinations of {0..n-1}
  for (int i = 0; i < m; ++i) pick[i] = i;
  while (true) {
    Eigen::MatrixXd basis(m, m);
    for (int k = 0; k < m; ++k) basis.col(k) = lp.a.col(pick[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xb = lu.solve(lp.b);
      if ((xb.array() >= -1e-9).all()) {
        double obj = 0.0;
        for (int k = 0; k < m; ++k) obj += lp.c(pick[k]) * xb(k);
        best = std::min(best, sign * obj);
        found = true;
      }
    }
    // next combination
    int i = m - 1;
    while (i >= 0 && pick[i] == n - m + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < m; ++k) pick[k] = pick[k - 1] + 1;
  }
  if (!found) return std::nullopt;
  return sign * best;
}

}  // namespace testutil
