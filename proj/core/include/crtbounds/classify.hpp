#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "crtbounds/model.hpp"

namespace crtb {

enum class LearnerKind { LINEAR, LOGISTIC_RIDGE };
enum class Target { NT, AT, CO };

enum class NoiseDiagnosis { OPTIMAL, EMPTY_Q, NONSHRINKING_Q };

struct NoiseChoice {
  double r = 0.0;
  NoiseDiagnosis diagnosis = NoiseDiagnosis::OPTIMAL;
};

struct SurrogateParams {
  double c = 0.1;
  double h = 1e-3;
};

// A trained classifier predicts 1{f(x) + e >= q}; the per-unit noise e is
// drawn once and frozen, so re-prediction is deterministic.
struct TrainedClassifier {
  LearnerKind kind = LearnerKind::LINEAR;
  Target target = Target::NT;
  Eigen::VectorXd theta;
  // CO composition state (unused for NT/AT)
  double w_nt = 0.0, w_at = 0.0;
  Eigen::VectorXd theta_nt, theta_at;

  std::vector<double> noise;  // one entry per unit, global flattened order
  double r = 0.0;
  NoiseDiagnosis diagnosis = NoiseDiagnosis::OPTIMAL;
  double c = 0.1;
  double h = 1e-3;
  double q = 0.0;

  double raw_f(const Eigen::VectorXd& x) const;
  double f_tilde(int unit_index, const Eigen::VectorXd& x) const {
    return raw_f(x) + noise[unit_index];
  }
  bool predict(int unit_index, const Eigen::VectorXd& x) const {
    return f_tilde(unit_index, x) >= q;
  }
};

struct TrainOptions {
  double lambda = 1e-3;  // ridge penalty for the logistic learner
  std::uint64_t seed = 0;
  // fixed noise half-width override (e.g. 1e-10 for the simulation setting)
  std::optional<double> r_override;
};

Eigen::VectorXd fit_learner(LearnerKind kind, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& labels,
                            double lambda = 1e-3);

double surrogate_indicator(double v, double c, double h);

NoiseChoice choose_noise_r(const std::vector<double>& f_values,
                           int target_count);

// `arm_f_tilde` are the training-arm randomized learner values,
// `n_target_hat` the estimated group size, `n` the total unit count, and
// `arm_target_count` the training-arm label count locating the gap.
SurrogateParams choose_c_h(const std::vector<double>& arm_f_tilde,
                           double n_target_hat, int n, int arm_target_count);

double calibrate_q(const std::vector<double>& f_tilde_values, double target,
                   double c, double h);

std::pair<TrainedClassifier, TrainedClassifier> train_nt_at(
    const StudyData& data, LearnerKind kind, const TrainOptions& opts = {});

TrainedClassifier compose_co(const TrainedClassifier& nt,
                             const TrainedClassifier& at,
                             const StudyData& data,
                             const TrainOptions& opts = {});

}  // namespace crtb
