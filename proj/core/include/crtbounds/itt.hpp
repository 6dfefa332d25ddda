#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "crtbounds/model.hpp"

namespace crtb {

struct IttResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double chi2_stat = 0.0;
  double p_value = 1.0;
};

// Column subset for the heterogeneous fit; empty `columns` means all stored
// covariates. The intercept is prepended unless the caller opts out.
struct CovariateSelector {
  std::vector<std::string> columns;
  bool add_intercept = true;
};

struct HeteroIttResult {
  Eigen::VectorXd beta;
  Eigen::MatrixXd covariance;            // Sigma_beta / J
  std::vector<IttResult> coefficients;   // one per coordinate
  std::vector<std::string> names;
  double joint_chi2 = 0.0;  // non-intercept coordinates vs chi^2_{p-1}
  int joint_dof = 0;
  double joint_p = 1.0;
};

struct WaldResult {
  double chi2 = 0.0;
  int dof = 0;
  double p = 1.0;
};

// upper tail of chi^2_dof via the regularized incomplete gamma function
double chi2_sf(double x, double dof);

IttResult estimate_overall_itt(const StudyData& data);

HeteroIttResult estimate_hetero_itt(const StudyData& data,
                                    const CovariateSelector& sel = {});

WaldResult wald_test(const Eigen::VectorXd& estimate,
                     const Eigen::MatrixXd& covariance,
                     const Eigen::VectorXd& null);

// Design-matrix row for one unit under a selector (shared with classifiers).
Eigen::MatrixXd design_matrix(const StudyData& data,
                              const CovariateSelector& sel);

inline constexpr double kCriticalValue95 = 1.959964;

}  // namespace crtb
