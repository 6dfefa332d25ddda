#include "crtbounds/lpsolve.hpp"

#include <cmath>

namespace crtb {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr double kRatioTol = 1e-11;
constexpr int kIterationCap = 50000;
}  // namespace

PresolveResult presolve(const LinearProgram& lp) {
  const int rows = static_cast<int>(lp.a.rows());
  const int n = static_cast<int>(lp.a.cols());
  const double b_scale = rows ? 1.0 + lp.b.cwiseAbs().maxCoeff() : 1.0;

  PresolveResult out;
  out.lp.c = lp.c;
  out.lp.sense = lp.sense;

  // incremental elimination: a row is dependent when reduction against the
  // kept pivots annihilates it
  std::vector<Eigen::VectorXd> pivots;  // normalized reduced rows
  std::vector<double> pivot_rhs;
  std::vector<int> pivot_cols;
  std::vector<int> kept;

  for (int i = 0; i < rows; ++i) {
    Eigen::VectorXd r = lp.a.row(i).transpose();
    double rhs = lp.b(i);
    const double row_scale = 1.0 + r.cwiseAbs().maxCoeff();
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      const double f = r(pivot_cols[k]);
      if (f != 0.0) {
        r -= f * pivots[k];
        rhs -= f * pivot_rhs[k];
      }
    }
    int pc = 0;
    const double mx = r.cwiseAbs().maxCoeff(&pc);
    if (mx <= kPivotTol * row_scale) {
      if (std::abs(rhs) > 1e-7 * b_scale) {
        out.infeasible = true;
        return out;
      }
      continue;  // redundant row dropped
    }
    const double piv = r(pc);
    pivots.push_back(r / piv);
    pivot_rhs.push_back(rhs / piv);
    pivot_cols.push_back(pc);
    kept.push_back(i);
  }

  out.kept_rows = kept;
  out.lp.a.resize(static_cast<int>(kept.size()), n);
  out.lp.b.resize(static_cast<int>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.lp.a.row(static_cast<int>(k)) = lp.a.row(kept[k]);
    out.lp.b(static_cast<int>(k)) = lp.b(kept[k]);
  }
  return out;
}

namespace {

// One simplex phase on the tableau; cost covers all columns in `t` except the
// rhs. `allowed` marks columns permitted to enter. Returns false on
// unboundedness. The reduced-cost row is maintained across pivots so each
// iteration costs O(rows * cols).
bool run_phase(Eigen::MatrixXd& t, std::vector<int>& basis,
               const Eigen::VectorXd& cost, const std::vector<char>& allowed,
               int& iterations) {
  const int rows = static_cast<int>(t.rows());
  const int cols = static_cast<int>(t.cols()) - 1;
  const int rhs = cols;

  Eigen::VectorXd red = cost;
  for (int i = 0; i < rows; ++i)
    if (cost(basis[i]) != 0.0)
      red -= cost(basis[i]) * t.row(i).head(cols).transpose();

  for (;;) {
    if (++iterations > kIterationCap) throw Error("cycling/degeneracy cap");

    // Bland: entering = lowest-index column with negative reduced cost
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      if (allowed[j] && red(j) < -kReducedCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;  // optimal

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < rows; ++i) {
      if (t(i, enter) > kRatioTol) {
        const double ratio = t(i, rhs) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 &&
             basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return false;  // unbounded direction

    // pivot
    t.row(leave) /= t(leave, enter);
    for (int i = 0; i < rows; ++i)
      if (i != leave && t(i, enter) != 0.0)
        t.row(i) -= t(i, enter) * t.row(leave);
    if (red(enter) != 0.0)
      red -= red(enter) * t.row(leave).head(cols).transpose();
    basis[leave] = enter;
  }
}

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  if (lp.a.rows() != lp.b.size() || lp.a.cols() != lp.c.size())
    throw Error("solve: inconsistent LP dimensions");

  LpSolution sol;
  PresolveResult pre = presolve(lp);
  if (pre.infeasible) {
    sol.status = LpSolution::INFEASIBLE;
    return sol;
  }
  const Eigen::MatrixXd& a = pre.lp.a;
  const Eigen::VectorXd& b = pre.lp.b;
  const int rows = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());

  // tableau with one artificial per row; rows flipped so b >= 0
  Eigen::MatrixXd t(rows, n + rows + 1);
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) {
    const double s = b(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = s * a.row(i);
    t.row(i).segment(n, rows).setZero();
    t(i, n + i) = 1.0;
    t(i, n + rows) = s * b(i);
    basis[i] = n + i;
  }

  int iterations = 0;

  // phase 1
  Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n + rows);
  cost1.tail(rows).setOnes();
  std::vector<char> allowed(n + rows, 1);
  run_phase(t, basis, cost1, allowed, iterations);  // bounded below by 0
  double phase1 = 0.0;
  for (int i = 0; i < rows; ++i)
    if (basis[i] >= n) phase1 += t(i, n + rows);
  if (phase1 > 1e-7 * (1.0 + b.cwiseAbs().maxCoeff())) {
    sol.status = LpSolution::INFEASIBLE;
    return sol;
  }
  // drive remaining artificials out of the basis (full row rank after
  // presolve guarantees a pivot exists)
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < n) continue;
    int enter = -1;
    for (int j = 0; j < n; ++j)
      if (std::abs(t(i, j)) > kPivotTol) {
        enter = j;
        break;
      }
    if (enter < 0) throw Error("presolve missed a dependent row");
    t.row(i) /= t(i, enter);
    for (int k = 0; k < rows; ++k)
      if (k != i && t(k, enter) != 0.0) t.row(k) -= t(k, enter) * t.row(i);
    basis[i] = enter;
  }

  // phase 2: artificials are locked out
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(n + rows);
  cost2.head(n) = (lp.sense == LinearProgram::MAX) ? (-lp.c).eval() : lp.c;
  std::fill(allowed.begin() + n, allowed.end(), 0);
  if (!run_phase(t, basis, cost2, allowed, iterations)) {
    sol.status = LpSolution::UNBOUNDED;
    return sol;
  }

  sol.status = LpSolution::OPTIMAL;
  sol.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < rows; ++i)
    if (basis[i] < n) sol.x(basis[i]) = t(i, n + rows);
  sol.objective_value = lp.c.dot(sol.x);
  return sol;
}

}  // namespace crtb
