#include "crtbounds/classify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crtbounds/itt.hpp"
#include "crtbounds/rng.hpp"

namespace crtb {

namespace {

double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                  : std::exp(t) / (1.0 + std::exp(t));
}

// deterministic, seed-independent tie-break noise in (-1, 1), keyed by the
// unit's global index
double tiebreak_unit(int index) {
  const std::uint64_t u = mix64(static_cast<std::uint64_t>(index) + 0x51ED);
  return ((u >> 11) * 0x1.0p-53) * 2.0 - 1.0;
}

}  // namespace

double TrainedClassifier::raw_f(const Eigen::VectorXd& x) const {
  if (target == Target::CO) {
    const double score = w_nt * x.dot(theta_nt) + w_at * x.dot(theta_at);
    return kind == LearnerKind::LINEAR ? -score : sigmoid(-score);
  }
  const double score = x.dot(theta);
  return kind == LearnerKind::LINEAR ? score : sigmoid(score);
}

Eigen::VectorXd fit_learner(LearnerKind kind, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& labels, double lambda) {
  if (x.rows() != labels.size() || x.rows() < x.cols())
    throw Error("fit_learner: bad problem dimensions");
  const int p = static_cast<int>(x.cols());

  if (kind == LearnerKind::LINEAR) {
    Eigen::MatrixXd gram = x.transpose() * x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) throw Error("singular normal equations");
    return lu.solve(x.transpose() * labels);
  }

  if (lambda <= 0.0) throw Error("LOGISTIC_RIDGE requires lambda > 0");
  // ridge logistic loss, Newton with step-halving from theta = 0
  auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd t = x * theta;
    double obj = 0.5 * lambda * theta.squaredNorm();
    for (int i = 0; i < t.size(); ++i)
      obj += std::log1p(std::exp(-std::abs(t(i)))) + std::max(t(i), 0.0) -
             labels(i) * t(i);
    return obj;
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  double obj = objective(theta);
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd t = x * theta;
    Eigen::VectorXd prob(t.size());
    for (int i = 0; i < t.size(); ++i) prob(i) = sigmoid(t(i));
    const Eigen::VectorXd grad =
        x.transpose() * (prob - labels) + lambda * theta;
    if (grad.norm() <= 1e-9) return theta;
    Eigen::MatrixXd hess = lambda * Eigen::MatrixXd::Identity(p, p);
    for (int i = 0; i < t.size(); ++i) {
      const double w = prob(i) * (1.0 - prob(i));
      hess.noalias() += w * x.row(i).transpose() * x.row(i);
    }
    const Eigen::VectorXd dir = hess.ldlt().solve(grad);
    double step = 1.0;
    for (int half = 0; half < 60; ++half) {
      const Eigen::VectorXd cand = theta - step * dir;
      const double cand_obj = objective(cand);
      if (cand_obj < obj) {
        theta = cand;
        obj = cand_obj;
        break;
      }
      step *= 0.5;
      if (half == 59) return theta;  // at numerical stationarity
    }
  }
  // check convergence once more before declaring failure
  Eigen::VectorXd t = x * theta;
  Eigen::VectorXd prob(t.size());
  for (int i = 0; i < t.size(); ++i) prob(i) = sigmoid(t(i));
  if ((x.transpose() * (prob - labels) + lambda * theta).norm() <= 1e-6)
    return theta;
  throw Error("Newton non-convergence in 200 iterations");
}

double surrogate_indicator(double v, double c, double h) {
  if (!(c > 0.0 && c < 0.5)) throw Error("surrogate_indicator: c not in (0,0.5)");
  if (!(h > 0.0)) throw Error("surrogate_indicator: h must be positive");
  const double k = (1.0 - 2.0 * c);
  if (v >= h) return 1.0 - c * std::exp(-k * (v - h) / (2.0 * c * h));
  if (v >= -h) return k * (v + h) / (2.0 * h) + c;
  return c * std::exp(k * (v + h) / (2.0 * c * h));
}

NoiseChoice choose_noise_r(const std::vector<double>& f_values,
                           int target_count) {
  const int n = static_cast<int>(f_values.size());
  if (target_count < 0 || target_count > n)
    throw Error("choose_noise_r: target_count out of range");
  if (target_count == 0 || target_count == n)
    return {0.0, NoiseDiagnosis::OPTIMAL};  // q placed outside by the caller

  std::vector<double> s = f_values;
  std::sort(s.begin(), s.end());
  const double lo = s[n - target_count - 1];  // f_(n-k)
  const double hi = s[n - target_count];      // f_(n-k+1)

  if (lo < hi) {
    // Q-hat = (lo, hi] non-empty; discrete learner values keep it from
    // shrinking, continuous ones do not
    const std::size_t distinct =
        std::set<double>(s.begin(), s.end()).size();
    if (2 * distinct <= static_cast<std::size_t>(n))
      return {(hi - lo) / 4.0, NoiseDiagnosis::NONSHRINKING_Q};
    return {0.0, NoiseDiagnosis::OPTIMAL};
  }

  // empty Q-hat: tie at q_M
  const double q_m = lo;
  double q_u = std::numeric_limits<double>::quiet_NaN();
  double q_l = std::numeric_limits<double>::quiet_NaN();
  for (double v : s)
    if (v > q_m) {
      q_u = v;
      break;
    }
  for (auto it = s.rbegin(); it != s.rend(); ++it)
    if (*it < q_m) {
      q_l = *it;
      break;
    }
  if (std::isnan(q_u) || std::isnan(q_l)) {
    // one-sided tie: extend the remedy continuously
    const double span = s.back() - s.front();
    return {std::max(1e-13, span / 4.0), NoiseDiagnosis::EMPTY_Q};
  }
  return {std::min(q_u - q_m, q_m - q_l) / 4.0, NoiseDiagnosis::EMPTY_Q};
}

SurrogateParams choose_c_h(const std::vector<double>& arm_f_tilde,
                           double n_target_hat, int n, int arm_target_count) {
  if (!(n_target_hat > 0.0 && n_target_hat < n))
    throw Error("choose_c_h: n_target_hat outside (0, n)");
  const int n1 = static_cast<int>(arm_f_tilde.size());

  double d1 = 0.0;
  if (arm_target_count >= 1 && arm_target_count <= n1 - 1) {
    std::vector<double> s = arm_f_tilde;
    std::sort(s.begin(), s.end());
    d1 = s[n1 - arm_target_count] - s[n1 - arm_target_count - 1];
  }
  const double d_hat = static_cast<double>(n1) * d1 / n;

  SurrogateParams sp;
  sp.h = std::max(1e-12, d_hat / 4.0);
  const double denom =
      std::max(std::log(n_target_hat), std::log(n - n_target_hat));
  sp.c = denom > 0.0 ? std::min(1.0 / denom, 0.49) : 0.49;
  return sp;
}

double calibrate_q(const std::vector<double>& f_tilde_values, double target,
                   double c, double h) {
  const int n = static_cast<int>(f_tilde_values.size());
  if (!(target > 0.0 && target < n))
    throw Error("calibrate_q: target out of range");

  auto hfun = [&](double q) {
    double s = 0.0;
    for (double v : f_tilde_values) s += surrogate_indicator(v - q, c, h);
    return s - target;
  };

  const auto [mn_it, mx_it] =
      std::minmax_element(f_tilde_values.begin(), f_tilde_values.end());
  const double margin = h + c * h * std::log(static_cast<double>(n) / c);
  double lo = *mn_it - margin, hi = *mx_it + margin;
  double width = hi - lo;
  for (int k = 0; k < 64 && hfun(lo) <= 0.0; ++k) lo -= width;
  for (int k = 0; k < 64 && hfun(hi) >= 0.0; ++k) hi += width;

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = hfun(mid);
    if (std::abs(v) <= 1e-10) break;
    (v > 0.0 ? lo : hi) = mid;
  }
  return mid;
}

namespace {

struct FlatData {
  Eigen::MatrixXd x;          // design with intercept
  std::vector<int> z;         // per unit
  std::vector<int> d;         // per unit
  int arm_units[2] = {0, 0};  // unit totals per arm
};

FlatData flatten(const StudyData& data) {
  FlatData f;
  f.x = design_matrix(data, CovariateSelector{});
  f.z.reserve(data.N());
  f.d.reserve(data.N());
  for (const auto& c : data.clusters())
    for (const auto& u : c.units) {
      f.z.push_back(c.z);
      f.d.push_back(u.d);
      f.arm_units[c.z]++;
    }
  return f;
}

std::vector<double> raw_values(const TrainedClassifier& cls,
                               const Eigen::MatrixXd& x) {
  std::vector<double> f(x.rows());
  for (int i = 0; i < x.rows(); ++i)
    f[i] = cls.raw_f(x.row(i).transpose());
  return f;
}

void draw_noise(TrainedClassifier& cls, const std::vector<double>& f_all,
                std::uint64_t seed, Stream stream) {
  const int n = static_cast<int>(f_all.size());
  cls.noise.resize(n);
  Rng rng(seed, stream);
  for (int i = 0; i < n; ++i) {
    cls.noise[i] = cls.r > 0.0
                       ? rng.uniform(-cls.r, cls.r)
                       : 1e-13 * (1.0 + std::abs(f_all[i])) * tiebreak_unit(i);
  }
}

// shared calibration tail for a trained learner: noise, (c, h), threshold
void calibrate_classifier(TrainedClassifier& cls,
                          const std::vector<double>& f_all,
                          const std::vector<int>* arm_units_idx,
                          double n_target_hat, double arm_target,
                          int arm_target_count, int n_total,
                          std::uint64_t seed, Stream stream,
                          const TrainOptions& opts) {
  std::vector<double> f_cal;  // values entering calibration
  if (arm_units_idx) {
    f_cal.reserve(arm_units_idx->size());
    for (int i : *arm_units_idx) f_cal.push_back(f_all[i]);
  } else {
    f_cal = f_all;
  }

  NoiseChoice nc = choose_noise_r(
      f_cal, std::clamp(arm_target_count, 0,
                        static_cast<int>(f_cal.size())));
  cls.diagnosis = nc.diagnosis;
  cls.r = opts.r_override.value_or(nc.r);
  draw_noise(cls, f_all, seed, stream);

  std::vector<double> ft_all(f_all.size());
  for (std::size_t i = 0; i < f_all.size(); ++i)
    ft_all[i] = f_all[i] + cls.noise[i];
  std::vector<double> ft_cal;
  if (arm_units_idx) {
    ft_cal.reserve(arm_units_idx->size());
    for (int i : *arm_units_idx) ft_cal.push_back(ft_all[i]);
  } else {
    ft_cal = ft_all;
  }

  const auto [mn, mx] = std::minmax_element(ft_all.begin(), ft_all.end());
  if (!(n_target_hat > 0.0 && n_target_hat < n_total) ||
      arm_target <= 0.0 ||
      arm_target >= static_cast<double>(ft_cal.size())) {
    // degenerate targets: constant predictor via an out-of-range threshold
    cls.c = 0.25;
    cls.h = 1e-6;
    cls.q = (arm_target <= 0.0) ? *mx + 1.0 : *mn - 1.0;
    return;
  }
  SurrogateParams sp =
      choose_c_h(ft_cal, n_target_hat, n_total, arm_target_count);
  cls.c = sp.c;
  cls.h = sp.h;
  cls.q = calibrate_q(ft_cal, arm_target, sp.c, sp.h);
}

}  // namespace

std::pair<TrainedClassifier, TrainedClassifier> train_nt_at(
    const StudyData& data, LearnerKind kind, const TrainOptions& opts) {
  const FlatData fd = flatten(data);
  const int n = data.N();

  auto train_one = [&](int z_arm, Target target, Stream stream) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (fd.z[i] == z_arm) idx.push_back(i);
    if (idx.empty()) throw Error("empty training arm");

    Eigen::MatrixXd xa(static_cast<int>(idx.size()), fd.x.cols());
    Eigen::VectorXd labels(static_cast<int>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      xa.row(static_cast<int>(k)) = fd.x.row(idx[k]);
      // NT label is 1-D on treated clusters; AT label is D on control ones
      labels(static_cast<int>(k)) =
          target == Target::NT ? 1.0 - fd.d[idx[k]] : fd.d[idx[k]];
    }

    TrainedClassifier cls;
    cls.kind = kind;
    cls.target = target;
    cls.theta = fit_learner(kind, xa, labels, opts.lambda);

    const std::vector<double> f_all = raw_values(cls, fd.x);
    const int target_count = static_cast<int>(std::lround(labels.sum()));
    const double n_hat =
        static_cast<double>(n) * target_count / fd.arm_units[z_arm];
    calibrate_classifier(cls, f_all, &idx, n_hat, target_count, target_count,
                         n, opts.seed, stream, opts);
    return cls;
  };

  return {train_one(1, Target::NT, Stream::noise_nt),
          train_one(0, Target::AT, Stream::noise_at)};
}

TrainedClassifier compose_co(const TrainedClassifier& nt,
                             const TrainedClassifier& at,
                             const StudyData& data, const TrainOptions& opts) {
  if (nt.kind != at.kind) throw Error("mixed learner kinds");
  const FlatData fd = flatten(data);
  const int n = data.N();

  double nt_count = 0.0, at_count = 0.0;
  for (int i = 0; i < n; ++i) {
    if (fd.z[i] == 1) nt_count += 1.0 - fd.d[i];
    if (fd.z[i] == 0) at_count += fd.d[i];
  }
  const double n_nt = static_cast<double>(n) * nt_count / fd.arm_units[1];
  const double n_at = static_cast<double>(n) * at_count / fd.arm_units[0];
  const double n_co = std::clamp(static_cast<double>(n) - n_nt - n_at, 0.0,
                                 static_cast<double>(n));

  TrainedClassifier co;
  co.kind = nt.kind;
  co.target = Target::CO;
  co.w_nt = n_nt / n;
  co.w_at = n_at / n;
  co.theta_nt = nt.theta;
  co.theta_at = at.theta;

  const std::vector<double> f_all = raw_values(co, fd.x);
  const int k = std::clamp(static_cast<int>(std::lround(n_co)), 0, n);
  calibrate_classifier(co, f_all, nullptr, n_co, n_co, k, n, opts.seed,
                       Stream::noise_co, opts);
  return co;
}

}  // namespace crtb
