#include "crtbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "crtbounds/itt.hpp"
#include "crtbounds/lpsolve.hpp"

namespace crtb {

namespace {

constexpr double kElasticPenalty = 1e6;
constexpr double kElasticTol = 1e-6;

// variable layout of the elastic program: 18 structural counts, 18 slacks
// (one per inequality), 28 tightness elastics, 10 two-sided equality elastics
constexpr int kNumRows = 28;
constexpr int kNumVars = 18 + 18 + 28 + 10;

int struct_col(int t, int z, int k) { return t * 6 + z * 3 + k; }
int slack_col(int ineq_row) { return 18 + (ineq_row - 10); }
int a_col(int row) { return 36 + row; }
int b_col(int eq_row) { return 64 + eq_row; }

constexpr int kTp = 0;
constexpr int kFp = 1;
constexpr int kFn = 2;

struct UnitView {
  int z = 0;
  int d = 0;
  double y = 0.0;
};

struct ViewData {
  Eigen::MatrixXd x;
  std::vector<UnitView> units;
  int arm_units[2] = {0, 0};
};

ViewData make_view(const StudyData& data) {
  ViewData v;
  v.x = design_matrix(data, CovariateSelector{});
  v.units.reserve(data.N());
  for (const auto& c : data.clusters())
    for (const auto& u : c.units) {
      v.units.push_back({c.z, u.d, u.y});
      v.arm_units[c.z]++;
    }
  return v;
}

double safe_ratio(double num, double den, const std::string& what,
                  std::vector<std::string>* warnings) {
  if (den == 0.0) {
    if (warnings)
      warnings->push_back("zero denominator in " + what + "; using 0");
    return 0.0;
  }
  return num / den;
}

}  // namespace

LpInputs compute_lp_inputs(const StudyData& data, const TrainedClassifier& nt,
                           const TrainedClassifier& at,
                           const TrainedClassifier& co) {
  const ViewData v = make_view(data);
  const int n = data.N();
  LpInputs in;
  in.n = n;

  std::vector<const TrainedClassifier*> cls = {&nt, &at, &co};
  std::vector<std::vector<int>> pred(3, std::vector<int>(n, 0));
  for (int t = 0; t < 3; ++t)
    for (int i = 0; i < n; ++i)
      pred[t][i] = cls[t]->predict(i, v.x.row(i).transpose()) ? 1 : 0;

  double sum_y[2] = {0.0, 0.0};
  double nt_count = 0.0, at_count = 0.0;    // observed labels per arm
  double y_nt1 = 0.0, y_at0 = 0.0;          // outcome totals over labels
  double pred_count[3][2] = {};             // predicted-type counts per arm
  double pred_y[3][2] = {};                 // outcomes over predictions
  double mis_nt = 0.0, mis_at = 0.0;        // contradicted predictions
  double mis_co1 = 0.0, mis_co0 = 0.0;
  for (int i = 0; i < n; ++i) {
    const UnitView& u = v.units[i];
    sum_y[u.z] += u.y;
    if (u.z == 1) {
      nt_count += 1 - u.d;
      y_nt1 += u.y * (1 - u.d);
      mis_nt += u.d * pred[0][i];
      mis_co1 += (1 - u.d) * pred[2][i];
    } else {
      at_count += u.d;
      y_at0 += u.y * u.d;
      mis_at += (1 - u.d) * pred[1][i];
      mis_co0 += u.d * pred[2][i];
    }
    for (int t = 0; t < 3; ++t) {
      pred_count[t][u.z] += pred[t][i];
      pred_y[t][u.z] += u.y * pred[t][i];
    }
  }

  in.s[1] = n * safe_ratio(sum_y[1], v.arm_units[1], "S^(1)", &in.warnings);
  in.s[0] = n * safe_ratio(sum_y[0], v.arm_units[0], "S^(0)", &in.warnings);
  in.n_t[0] = n * safe_ratio(nt_count, v.arm_units[1], "N_NT", &in.warnings);
  in.n_t[1] = n * safe_ratio(at_count, v.arm_units[0], "N_AT", &in.warnings);
  in.n_t[2] = std::clamp(n - in.n_t[0] - in.n_t[1], 0.0,
                         static_cast<double>(n));
  in.s_nt1 = in.n_t[0] * safe_ratio(y_nt1, nt_count, "S_NT^(1)", &in.warnings);
  in.s_at0 = in.n_t[1] * safe_ratio(y_at0, at_count, "S_AT^(0)", &in.warnings);
  for (int t = 0; t < 3; ++t)
    for (int z = 0; z < 2; ++z)
      in.s_ct[t][z] =
          in.n_t[t] * safe_ratio(pred_y[t][z], pred_count[t][z],
                                 "predicted-type outcome share", &in.warnings);

  in.r_t[0] = in.n_t[0] *
              safe_ratio(mis_nt, pred_count[0][1], "R_NT", &in.warnings);
  in.r_t[1] = in.n_t[1] *
              safe_ratio(mis_at, pred_count[1][0], "R_AT", &in.warnings);
  in.r_t[2] =
      in.n_t[2] * (safe_ratio(mis_co1, pred_count[2][1], "R_CO", &in.warnings) +
                   safe_ratio(mis_co0, pred_count[2][0], "R_CO", &in.warnings));
  for (int t = 0; t < 3; ++t)
    in.r_t[t] = std::clamp(in.r_t[t], 0.0, in.n_t[t]);
  return in;
}

namespace {

LinearProgram base_program(const LpInputs& in) {
  LinearProgram lp;
  lp.a = Eigen::MatrixXd::Zero(kNumRows, kNumVars);
  lp.b = Eigen::VectorXd::Zero(kNumRows);
  lp.c = Eigen::VectorXd::Zero(kNumVars);

  // equality rows 0-9, each with elastic pair a - b
  auto eq_elastic = [&](int row) {
    lp.a(row, a_col(row)) = 1.0;
    lp.a(row, b_col(row)) = -1.0;
  };
  for (int t = 0; t < 3; ++t) {
    lp.a(0, struct_col(t, 1, kTp)) = 1.0;
    lp.a(0, struct_col(t, 1, kFn)) = 1.0;
    lp.a(1, struct_col(t, 0, kTp)) = 1.0;
    lp.a(1, struct_col(t, 0, kFn)) = 1.0;
  }
  lp.b(0) = in.s[1];
  lp.b(1) = in.s[0];
  lp.a(2, struct_col(0, 1, kTp)) = 1.0;
  lp.a(2, struct_col(0, 1, kFn)) = 1.0;
  lp.b(2) = in.s_nt1;
  lp.a(3, struct_col(1, 0, kTp)) = 1.0;
  lp.a(3, struct_col(1, 0, kFn)) = 1.0;
  lp.b(3) = in.s_at0;
  for (int t = 0; t < 3; ++t)
    for (int z = 1; z >= 0; --z) {
      const int row = 4 + 2 * t + (1 - z);
      lp.a(row, struct_col(t, z, kTp)) = 1.0;
      lp.a(row, struct_col(t, z, kFp)) = 1.0;
      lp.b(row) = in.s_ct[t][z];
    }
  for (int row = 0; row < 10; ++row) eq_elastic(row);

  // inequality rows with slack and a one-sided tightness elastic
  auto ineq = [&](int row) {
    lp.a(row, slack_col(row)) = 1.0;
    lp.a(row, a_col(row)) = 1.0;
  };
  for (int t = 0; t < 3; ++t)
    for (int k = 0; k < 3; ++k) {
      // control-arm counts cannot exceed treated-arm counts
      const int row = 10 + 3 * t + k;
      lp.a(row, struct_col(t, 0, k)) = 1.0;
      lp.a(row, struct_col(t, 1, k)) = -1.0;
      ineq(row);
      // misclassification caps on the treated arm
      const int cap = 19 + 3 * t + k;
      lp.a(cap, struct_col(t, 1, k)) = 1.0;
      lp.b(cap) = k == kTp ? std::max(0.0, in.n_t[t] - in.r_t[t]) : in.r_t[t];
      ineq(cap);
    }
  return lp;
}

Bound solve_type(const LpInputs& in, int t,
                 std::vector<std::string>* warnings) {
  Bound bound;
  if (in.n_t[t] < 0.5) return bound;  // vanishing stratum: [0, 0]

  LinearProgram lp = base_program(in);
  const double coef = 1.0 / in.n_t[t];
  auto tau_of = [&](const Eigen::VectorXd& x) {
    return coef * (x(struct_col(t, 1, kTp)) + x(struct_col(t, 1, kFn)) -
                   x(struct_col(t, 0, kTp)) - x(struct_col(t, 0, kFn)));
  };

  double endpoints[2] = {0.0, 0.0};
  for (int pass = 0; pass < 2; ++pass) {
    const bool maximize = pass == 1;
    lp.sense = maximize ? LinearProgram::Sense::MAX : LinearProgram::Sense::MIN;
    lp.c.setZero();
    lp.c(struct_col(t, 1, kTp)) = coef;
    lp.c(struct_col(t, 1, kFn)) = coef;
    lp.c(struct_col(t, 0, kTp)) = -coef;
    lp.c(struct_col(t, 0, kFn)) = -coef;
    const double penalty = maximize ? -kElasticPenalty : kElasticPenalty;
    for (int col = 36; col < kNumVars; ++col) lp.c(col) = penalty;

    const LpSolution sol = solve(lp);
    if (sol.status != LpSolution::Status::OPTIMAL)
      throw Error("bound program did not solve to optimality");
    endpoints[pass] = tau_of(sol.x);
    for (int col = 36; col < kNumVars; ++col)
      if (sol.x(col) > kElasticTol) bound.feasible = false;
  }
  if (!bound.feasible && warnings)
    warnings->push_back(
        "bound program required elastic relaxation; inputs are inconsistent");
  bound.lower = std::min(endpoints[0], endpoints[1]);
  bound.upper = std::max(endpoints[0], endpoints[1]);
  return bound;
}

}  // namespace

BoundSet classifier_bounds(const LpInputs& inputs,
                           std::vector<std::string>* warnings) {
  BoundSet out;
  for (int t = 0; t < 3; ++t) out.by_type(t) = solve_type(inputs, t, warnings);
  return out;
}

BoundSet extended_bounds(const StudyData& data,
                         const std::string& strata_column,
                         std::vector<std::string>* warnings) {
  const int col = data.column(strata_column);

  struct StratumAcc {
    int n = 0;
    int arm_units[2] = {0, 0};
    double sum_y[2] = {0.0, 0.0};
    double nt_count = 0.0, at_count = 0.0;
    double y_nt1 = 0.0, y_at0 = 0.0;
  };
  std::map<double, StratumAcc> strata;
  for (const auto& c : data.clusters())
    for (const auto& u : c.units) {
      StratumAcc& s = strata[u.x[col]];
      s.n++;
      s.arm_units[c.z]++;
      s.sum_y[c.z] += u.y;
      if (c.z == 1) {
        s.nt_count += 1 - u.d;
        s.y_nt1 += u.y * (1 - u.d);
      } else {
        s.at_count += u.d;
        s.y_at0 += u.y * u.d;
      }
    }

  double weight_sum[3] = {};
  double low_acc[3] = {}, up_acc[3] = {};
  for (const auto& [value, s] : strata) {
    if (s.arm_units[0] == 0 || s.arm_units[1] == 0)
      throw Error("stratum lacks units in both arms: " +
                  strata_column + " = " + std::to_string(value));
    const double nw = s.n;
    const double n_nt = nw * s.nt_count / s.arm_units[1];
    const double n_at = nw * s.at_count / s.arm_units[0];
    const double n_co = std::max(0.0, nw - n_nt - n_at);
    const double s1 = nw * s.sum_y[1] / s.arm_units[1];
    const double s0 = nw * s.sum_y[0] / s.arm_units[0];
    const double s_nt1 = nw * s.y_nt1 / s.arm_units[1];
    const double s_at0 = nw * s.y_at0 / s.arm_units[0];

    const double den_nc = n_nt + n_co;  // never-takers plus compliers
    const double den_ac = n_at + n_co;
    const double gamma = den_nc > 0.0 ? n_nt / den_nc : 0.0;
    const double pi0 = den_nc > 0.0 ? (s0 - s_at0) / den_nc : 0.0;
    const double delta = den_ac > 0.0 ? n_at / den_ac : 0.0;
    const double lam1 = den_ac > 0.0 ? (s1 - s_nt1) / den_ac : 0.0;

    const double n_hat[3] = {n_nt, n_at, n_co};
    double low[3] = {}, up[3] = {};
    const double tiny = 1e-12;
    if (n_nt > tiny && gamma > tiny) {
      const double p1 = s_nt1 / n_nt;
      low[0] = std::max(0.0, p1 - pi0 / gamma);
      up[0] = std::min(p1, p1 + (1.0 - gamma - pi0) / gamma);
    } else if (n_nt > tiny && warnings) {
      warnings->push_back("degenerate never-taker share in stratum " +
                          std::to_string(value) + "; contributing 0");
    }
    if (n_at > tiny && delta > tiny) {
      const double p0 = s_at0 / n_at;
      low[1] = std::max(0.0, (lam1 - 1.0 + delta) / delta - p0);
      up[1] = std::min(1.0 - p0, lam1 / delta - p0);
    } else if (n_at > tiny && warnings) {
      warnings->push_back("degenerate always-taker share in stratum " +
                          std::to_string(value) + "; contributing 0");
    }
    if (n_co > tiny && delta < 1.0 - tiny && gamma < 1.0 - tiny) {
      low[2] = std::max(0.0,
                        (lam1 - delta) / (1.0 - delta) - pi0 / (1.0 - gamma));
      up[2] = std::min(1.0, lam1 / (1.0 - delta) +
                                (gamma - pi0) / (1.0 - gamma));
    } else if (n_co > tiny && warnings) {
      warnings->push_back("degenerate complier share in stratum " +
                          std::to_string(value) + "; contributing 0");
    }
    for (int t = 0; t < 3; ++t) {
      if (n_hat[t] <= tiny) continue;
      if (up[t] < low[t]) {  // plug-in noise can cross the endpoints
        const double mid = 0.5 * (low[t] + up[t]);
        low[t] = up[t] = mid;
      }
      weight_sum[t] += n_hat[t];
      low_acc[t] += n_hat[t] * low[t];
      up_acc[t] += n_hat[t] * up[t];
    }
  }

  BoundSet out;
  for (int t = 0; t < 3; ++t) {
    Bound& b = out.by_type(t);
    if (weight_sum[t] <= 0.0) {
      if (warnings)
        warnings->push_back("no mass for a type in any stratum; bound [0, 0]");
      continue;
    }
    b.lower = low_acc[t] / weight_sum[t];
    b.upper = up_acc[t] / weight_sum[t];
  }
  return out;
}

BoundSet intersect(const BoundSet& classifier, const BoundSet& extended,
                   std::vector<std::string>* warnings) {
  BoundSet out;
  for (int t = 0; t < 3; ++t) {
    const Bound& a = classifier.by_type(t);
    const Bound& b = extended.by_type(t);
    Bound& r = out.by_type(t);
    r.feasible = a.feasible && b.feasible;
    r.lower = std::max(a.lower, b.lower);
    r.upper = std::min(a.upper, b.upper);
    if (r.lower > r.upper) {
      if (r.lower - r.upper > 1e-9 && warnings)
        warnings->push_back("intersected bounds crossed; collapsing to a point");
      const double mid = 0.5 * (r.lower + r.upper);
      r.lower = r.upper = mid;
    }
  }
  return out;
}

std::pair<StudyData, RescaleInfo> rescale_outcomes(const StudyData& data) {
  RescaleInfo info;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& c : data.clusters())
    for (const auto& u : c.units) {
      mn = std::min(mn, u.y);
      mx = std::max(mx, u.y);
    }
  if (!(mx > mn)) {
    info.degenerate = true;
    return {data, info};
  }
  info.shift = mn;
  info.scale = mx - mn;
  std::vector<Cluster> clusters = data.clusters();
  for (auto& c : clusters)
    for (auto& u : c.units) u.y = (u.y - info.shift) / info.scale;
  return {StudyData(std::move(clusters), data.covariate_names()), info};
}

BoundResults run_bound_pipeline(const StudyData& data,
                                const PipelineConfig& config) {
  BoundResults res;
  auto [scaled, info] = rescale_outcomes(data);
  res.rescale = info;

  TrainOptions opts;
  opts.lambda = config.lambda;
  opts.seed = config.seed;
  opts.r_override = config.r_override;
  auto [nt, at] = train_nt_at(scaled, config.kind, opts);
  res.co = compose_co(nt, at, scaled, opts);
  res.nt = std::move(nt);
  res.at = std::move(at);

  res.inputs = compute_lp_inputs(scaled, res.nt, res.at, res.co);
  res.warnings = res.inputs.warnings;

  auto back = [&](BoundSet b) {
    for (int t = 0; t < 3; ++t) {
      b.by_type(t).lower *= info.scale;
      b.by_type(t).upper *= info.scale;
    }
    return b;
  };
  res.classifier = back(classifier_bounds(res.inputs, &res.warnings));
  if (config.strata_column) {
    res.extended =
        back(extended_bounds(scaled, *config.strata_column, &res.warnings));
    res.intersection = intersect(res.classifier, *res.extended, &res.warnings);
  } else {
    res.intersection = res.classifier;
  }
  return res;
}

}  // namespace crtb
