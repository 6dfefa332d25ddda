#include "crtbounds/itt.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace crtb {

double chi2_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

namespace {

IttResult make_result(double estimate, double variance_over_j) {
  IttResult r;
  r.estimate = estimate;
  r.std_error = std::sqrt(std::max(0.0, variance_over_j));
  r.ci_low = estimate - kCriticalValue95 * r.std_error;
  r.ci_high = estimate + kCriticalValue95 * r.std_error;
  if (r.std_error > 0.0) {
    double z = estimate / r.std_error;
    r.chi2_stat = z * z;
  } else {
    r.chi2_stat = (estimate == 0.0) ? 0.0
                                    : std::numeric_limits<double>::infinity();
  }
  r.p_value = chi2_sf(r.chi2_stat, 1.0);
  return r;
}

void require_two_clusters_per_arm(const StudyData& data) {
  if (data.m() < 2 || data.J() - data.m() < 2)
    throw Error("insufficient clusters for variance");
}

void check_arm_design(const Eigen::MatrixXd& a, const char* arm) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  double smin = s(s.size() - 1), smax = s(0);
  if (smin <= 0.0 || smax / smin > 1e12)
    throw Error(std::string("singular design in ") + arm + " arm");
}

}  // namespace

Eigen::MatrixXd design_matrix(const StudyData& data,
                              const CovariateSelector& sel) {
  std::vector<int> cols;
  if (sel.columns.empty()) {
    for (int k = 0; k < data.p_raw(); ++k) cols.push_back(k);
  } else {
    for (const auto& name : sel.columns) cols.push_back(data.column(name));
  }
  const int p = static_cast<int>(cols.size()) + (sel.add_intercept ? 1 : 0);
  Eigen::MatrixXd x(data.N(), p);
  int row = 0;
  for (const auto& c : data.clusters())
    for (const auto& u : c.units) {
      int k = 0;
      if (sel.add_intercept) x(row, k++) = 1.0;
      for (int col : cols) x(row, k++) = u.x[col];
      ++row;
    }
  return x;
}

IttResult estimate_overall_itt(const StudyData& data) {
  const int J = data.J(), m = data.m(), N = data.N();
  if (m < 1 || m > J - 1) throw Error("both arms must be non-empty");

  double sum_y[2] = {0.0, 0.0};
  double sum_n[2] = {0.0, 0.0};
  for (const auto& c : data.clusters())
    for (const auto& u : c.units) {
      sum_y[c.z] += u.y;
      sum_n[c.z] += 1.0;
    }
  const double estimate = sum_y[1] / sum_n[1] - sum_y[0] / sum_n[0];

  require_two_clusters_per_arm(data);

  // scaled per-cluster aggregates and arm means
  const double scale = static_cast<double>(J) / N;
  Eigen::VectorXd yj(J);
  Eigen::VectorXd nj(J);
  double mean_y[2] = {0.0, 0.0};
  double mean_n[2] = {0.0, 0.0};
  const int arm_count[2] = {J - m, m};
  for (int j = 0; j < J; ++j) {
    const auto& c = data.clusters()[j];
    double s = 0.0;
    for (const auto& u : c.units) s += u.y;
    yj(j) = scale * s;
    nj(j) = scale * c.n();
    mean_y[c.z] += yj(j);
    mean_n[c.z] += nj(j);
  }
  for (int z = 0; z < 2; ++z) {
    mean_y[z] /= arm_count[z];
    mean_n[z] /= arm_count[z];
  }

  double v[2] = {0.0, 0.0};
  double mean_r[2] = {0.0, 0.0};
  Eigen::VectorXd res(J);
  for (int j = 0; j < J; ++j) {
    const auto& c = data.clusters()[j];
    // ratio-estimator residual: the scalar (intercept-only) case of the
    // regression residual, exactly invariant to affine outcome changes
    res(j) = yj(j) - nj(j) * (mean_y[c.z] / mean_n[c.z]);
    mean_r[c.z] += res(j);
  }
  mean_r[0] /= arm_count[0];
  mean_r[1] /= arm_count[1];
  for (int j = 0; j < J; ++j) {
    const auto& c = data.clusters()[j];
    double d = res(j) - mean_r[c.z];
    v[c.z] += d * d;
  }
  v[0] /= (arm_count[0] - 1);
  v[1] /= (arm_count[1] - 1);

  const double sigma2 = J * (v[1] / m + v[0] / (J - m));
  return make_result(estimate, sigma2 / J);
}

HeteroIttResult estimate_hetero_itt(const StudyData& data,
                                    const CovariateSelector& sel) {
  const int J = data.J(), m = data.m(), N = data.N();
  if (m < 1 || m > J - 1) throw Error("both arms must be non-empty");

  Eigen::MatrixXd x = design_matrix(data, sel);
  const int p = static_cast<int>(x.cols());

  // arm-wise normal equations, accumulated cluster-by-cluster so the
  // intercept-only case reduces to the overall estimator bit-for-bit
  Eigen::MatrixXd a[2] = {Eigen::MatrixXd::Zero(p, p),
                          Eigen::MatrixXd::Zero(p, p)};
  Eigen::VectorXd b[2] = {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p)};
  {
    int row = 0;
    for (const auto& c : data.clusters())
      for (const auto& u : c.units) {
        const auto xr = x.row(row).transpose();
        a[c.z] += xr * xr.transpose();
        b[c.z] += xr * u.y;
        ++row;
      }
  }
  check_arm_design(a[1], "treated");
  check_arm_design(a[0], "control");

  Eigen::VectorXd beta(p);
  if (p == 1) {
    beta(0) = b[1](0) / a[1](0, 0) - b[0](0) / a[0](0, 0);
  } else {
    beta = a[1].ldlt().solve(b[1]) - a[0].ldlt().solve(b[0]);
  }

  require_two_clusters_per_arm(data);

  // scaled aggregates
  const double scale = static_cast<double>(J) / N;
  std::vector<Eigen::MatrixXd> xj(J);
  std::vector<Eigen::VectorXd> yxj(J);
  Eigen::MatrixXd mean_x[2] = {Eigen::MatrixXd::Zero(p, p),
                               Eigen::MatrixXd::Zero(p, p)};
  Eigen::VectorXd mean_yx[2] = {Eigen::VectorXd::Zero(p),
                                Eigen::VectorXd::Zero(p)};
  const int arm_count[2] = {J - m, m};
  {
    int row = 0;
    for (int j = 0; j < J; ++j) {
      const auto& c = data.clusters()[j];
      Eigen::MatrixXd sx = Eigen::MatrixXd::Zero(p, p);
      Eigen::VectorXd sy = Eigen::VectorXd::Zero(p);
      for (const auto& u : c.units) {
        const auto xr = x.row(row).transpose();
        sx += xr * xr.transpose();
        sy += xr * u.y;
        ++row;
      }
      xj[j] = scale * sx;
      yxj[j] = scale * sy;
      mean_x[c.z] += xj[j];
      mean_yx[c.z] += yxj[j];
    }
  }
  for (int z = 0; z < 2; ++z) {
    mean_x[z] /= arm_count[z];
    mean_yx[z] /= arm_count[z];
  }
  Eigen::MatrixXd mx_inv[2];
  for (int z = 0; z < 2; ++z) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mean_x[z]);
    if (!lu.isInvertible())
      throw Error(std::string("singular design in ") +
                  (z == 1 ? "treated" : "control") + " arm");
    mx_inv[z] = lu.inverse();
  }

  std::vector<Eigen::VectorXd> res(J);
  Eigen::VectorXd mean_r[2] = {Eigen::VectorXd::Zero(p),
                               Eigen::VectorXd::Zero(p)};
  for (int j = 0; j < J; ++j) {
    const auto& c = data.clusters()[j];
    res[j] = yxj[j] - xj[j] * (mx_inv[c.z] * mean_yx[c.z]);
    mean_r[c.z] += res[j];
  }
  for (int z = 0; z < 2; ++z) mean_r[z] /= arm_count[z];

  Eigen::MatrixXd v[2] = {Eigen::MatrixXd::Zero(p, p),
                          Eigen::MatrixXd::Zero(p, p)};
  for (int j = 0; j < J; ++j) {
    const auto& c = data.clusters()[j];
    Eigen::VectorXd d = res[j] - mean_r[c.z];
    v[c.z] += d * d.transpose();
  }
  for (int z = 0; z < 2; ++z) v[z] /= (arm_count[z] - 1);

  Eigen::MatrixXd sigma_beta =
      J * (mx_inv[1] * v[1] * mx_inv[1] / m +
           mx_inv[0] * v[0] * mx_inv[0] / (J - m));
  Eigen::MatrixXd cov = sigma_beta / J;

  HeteroIttResult out;
  out.beta = beta;
  out.covariance = cov;
  if (sel.add_intercept) out.names.push_back("intercept");
  if (sel.columns.empty())
    for (const auto& n : data.covariate_names()) out.names.push_back(n);
  else
    for (const auto& n : sel.columns) out.names.push_back(n);
  for (int k = 0; k < p; ++k)
    out.coefficients.push_back(make_result(beta(k), cov(k, k)));

  if (sel.add_intercept && p > 1) {
    Eigen::VectorXd sub = beta.tail(p - 1);
    Eigen::MatrixXd sub_cov = cov.bottomRightCorner(p - 1, p - 1);
    WaldResult w =
        wald_test(sub, sub_cov, Eigen::VectorXd::Zero(p - 1));
    out.joint_chi2 = w.chi2;
    out.joint_dof = w.dof;
    out.joint_p = w.p;
  }
  return out;
}

WaldResult wald_test(const Eigen::VectorXd& estimate,
                     const Eigen::MatrixXd& covariance,
                     const Eigen::VectorXd& null) {
  if (estimate.size() != null.size() ||
      covariance.rows() != estimate.size() ||
      covariance.cols() != estimate.size())
    throw Error("wald_test: dimension mismatch");

  Eigen::VectorXd d = estimate - null;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance);
  const auto& vals = es.eigenvalues();
  const double tol = 1e-12 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  Eigen::VectorXd inv_vals = Eigen::VectorXd::Zero(vals.size());
  int rank = 0;
  for (int i = 0; i < vals.size(); ++i)
    if (vals(i) > tol) {
      inv_vals(i) = 1.0 / vals(i);
      ++rank;
    }
  Eigen::VectorXd t = es.eigenvectors().transpose() * d;
  WaldResult w;
  w.chi2 = (t.array().square() * inv_vals.array()).sum();
  w.dof = rank;
  w.p = rank == 0 ? 1.0 : chi2_sf(w.chi2, rank);
  return w;
}

}  // namespace crtb
