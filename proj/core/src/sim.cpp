#include "crtbounds/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crtbounds/infer.hpp"
#include "crtbounds/itt.hpp"

namespace crtb {

namespace {

double expit(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                  : std::exp(t) / (1.0 + std::exp(t));
}

int draw_categorical(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

// receipt probability under assignment z, given peers' mean receipt
double outcome_prob(const SimUnit& u, int z, double dbar) {
  return u.d[z] == 0 ? expit(-3.0 + 2.0 * dbar)
                     : expit(-1.0 + 4.0 * u.vaccine);
}

Eigen::RowVectorXd design_row(const SimUnit& u) {
  Eigen::RowVectorXd x(5);
  x << 1.0, u.male, u.age, u.age * u.age, u.vaccine;
  return x;
}

}  // namespace

Population generate_population(const SimConfig& cfg, Rng& rng) {
  if (cfg.j < 2 || cfg.m < 1 || cfg.m > cfg.j - 1)
    throw Error("SimConfig requires J >= 2 and 1 <= m <= J-1");
  if (cfg.size_values.size() != cfg.size_probs.size() ||
      cfg.size_values.empty())
    throw Error("cluster-size distribution is malformed");

  Population pop;
  pop.clusters.resize(cfg.j);
  for (auto& cluster : pop.clusters) {
    const int n = cfg.size_values[draw_categorical(cfg.size_probs, rng)];
    cluster.units.resize(n);
    for (auto& u : cluster.units) {
      u.male = rng.uniform() < cfg.p_male ? 1.0 : 0.0;
      u.age = static_cast<double>(
          cfg.age_min +
          static_cast<int>(rng.below(cfg.age_max - cfg.age_min + 1)));
      u.vaccine = rng.uniform() < cfg.p_vaccine ? 1.0 : 0.0;

      // compliance weights: bell curves in age, sharper for women
      const double s = u.male == 1.0 ? 150.0 : 20.0;
      const double w_nt = 1.0;
      const double w_at = std::exp(-(u.age - 40.0) * (u.age - 65.0) / s);
      const double w_co = std::exp(-(u.age - 20.0) * (u.age - 50.0) / s);
      const double total = w_nt + w_at + w_co;
      u.label = draw_categorical({w_nt / total, w_at / total, w_co / total},
                                 rng);
      u.d[0] = u.label == 1 ? 1 : 0;            // always-takers only
      u.d[1] = u.label == 0 ? 0 : 1;            // everyone but never-takers
    }

    // within-cluster interference enters through peers' receipt rate
    const int n_units = static_cast<int>(cluster.units.size());
    for (int z = 0; z < 2; ++z) {
      int receipts = 0;
      for (const auto& u : cluster.units) receipts += u.d[z];
      for (auto& u : cluster.units) {
        const double dbar =
            n_units > 1
                ? static_cast<double>(receipts - u.d[z]) / (n_units - 1)
                : 0.0;
        const double p = outcome_prob(u, z, dbar);
        const int draw = rng.uniform() < p ? 1 : 0;
        u.y[z] = z == 0 ? draw : std::max(u.y[0], draw);
      }
    }
  }
  return pop;
}

TrueEstimands true_estimands(const Population& pop) {
  const int n = pop.n_units();
  TrueEstimands te;
  Eigen::MatrixXd x(n, 5);
  Eigen::VectorXd tau(n);
  double type_sum[3] = {};
  int i = 0;
  for (const auto& c : pop.clusters)
    for (const auto& u : c.units) {
      x.row(i) = design_row(u);
      tau(i) = u.y[1] - u.y[0];
      te.tau_itt += tau(i);
      te.n_t[u.label] += 1.0;
      type_sum[u.label] += tau(i);
      ++i;
    }
  te.tau_itt /= n;
  for (int t = 0; t < 3; ++t)
    te.tau_t[t] = te.n_t[t] > 0.0 ? type_sum[t] / te.n_t[t] : 0.0;

  Eigen::MatrixXd gram = x.transpose() * x;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible()) throw Error("singular design for the projection");
  te.beta = lu.solve(x.transpose() * tau);
  return te;
}

StudyData randomize(const Population& pop, int m, Rng& rng,
                    std::vector<int>* z_out) {
  const int j = static_cast<int>(pop.clusters.size());
  if (m < 1 || m > j - 1) throw Error("m out of range");

  // partial Fisher-Yates: the first m entries form the treated subset
  std::vector<int> order(j);
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < m; ++i)
    std::swap(order[i], order[i + static_cast<int>(rng.below(j - i))]);
  std::vector<int> z(j, 0);
  for (int i = 0; i < m; ++i) z[order[i]] = 1;
  if (z_out) *z_out = z;

  std::vector<Cluster> clusters(j);
  for (int c = 0; c < j; ++c) {
    clusters[c].id = "c" + std::to_string(c);
    clusters[c].z = z[c];
    for (const auto& u : pop.clusters[c].units) {
      Unit obs;
      obs.cluster_id = clusters[c].id;
      obs.d = u.d[z[c]];
      obs.y = static_cast<double>(u.y[z[c]]);
      obs.x = {u.male, u.age, u.age * u.age, u.vaccine};
      clusters[c].units.push_back(std::move(obs));
    }
  }
  return StudyData(std::move(clusters),
                   {"male", "age", "age2", "vaccine"});
}

LpInputs population_lp_inputs(const Population& pop,
                              const std::vector<std::vector<int>>& pred) {
  const int n = pop.n_units();
  if (pred.size() != 3)
    throw Error("population_lp_inputs expects predictions for 3 types");
  for (const auto& p : pred)
    if (static_cast<int>(p.size()) != n)
      throw Error("prediction vector length mismatch");

  LpInputs in;
  in.n = n;
  int i = 0;
  for (const auto& c : pop.clusters)
    for (const auto& u : c.units) {
      in.s[0] += u.y[0];
      in.s[1] += u.y[1];
      in.n_t[u.label] += 1.0;
      if (u.label == 0) in.s_nt1 += u.y[1];
      if (u.label == 1) in.s_at0 += u.y[0];
      for (int t = 0; t < 3; ++t)
        if (pred[t][i]) {
          in.s_ct[t][0] += u.y[0];
          in.s_ct[t][1] += u.y[1];
          if (u.label != t) in.r_t[t] += 1.0;  // units of other types caught
        }
      ++i;
    }
  for (int t = 0; t < 3; ++t)
    in.r_t[t] = std::clamp(in.r_t[t], 0.0, in.n_t[t]);
  return in;
}

ReplicationReport replicate(const SimConfig& cfg,
                            const ReplicationOptions& opts) {
  Rng pop_rng(cfg.seed, Stream::population);
  const Population pop = generate_population(cfg, pop_rng);

  ReplicationReport rep;
  rep.truth = true_estimands(pop);
  const int p = static_cast<int>(rep.truth.beta.size());

  std::vector<double> estimates;
  double sum_var = 0.0, sum_p = 0.0;
  int itt_cover = 0;
  std::vector<int> beta_cover(p, 0);
  double bound_low[3] = {}, bound_up[3] = {};
  int bound_cover[3] = {}, ci_cover[3] = {};
  int bounds_done = 0;

  for (int r = 0; r < cfg.reps; ++r) {
    Rng rand_rng(cfg.seed, Stream::randomization,
                 static_cast<std::uint64_t>(r));
    const StudyData data = randomize(pop, cfg.m, rand_rng);
    try {
      const IttResult itt = estimate_overall_itt(data);
      estimates.push_back(itt.estimate);
      sum_var += itt.std_error * itt.std_error;
      sum_p += itt.p_value;
      if (itt.ci_low <= rep.truth.tau_itt && rep.truth.tau_itt <= itt.ci_high)
        itt_cover++;

      if (opts.hetero) {
        CovariateSelector sel;
        sel.columns = data.covariate_names();
        const HeteroIttResult het = estimate_hetero_itt(data, sel);
        for (int k = 0; k < p; ++k) {
          const double se = std::sqrt(het.covariance(k, k));
          if (std::abs(het.beta(k) - rep.truth.beta(k)) <=
              kCriticalValue95 * se)
            beta_cover[k]++;
        }
      }

      if (opts.bounds) {
        PipelineConfig pc;
        pc.kind = opts.kind;
        pc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        BoundSet set;
        if (opts.bootstrap_b > 0) {
          BootstrapConfig bc;
          bc.b = opts.bootstrap_b;
          bc.alpha = opts.alpha;
          bc.seed = derive_seed(cfg.seed, 0x5EED0000u + r);
          const BootstrapResult boot = cluster_bootstrap(data, pc, bc);
          set = boot.point.intersection;
          for (int t = 0; t < 3; ++t) {
            const ConfidenceSet& ci =
                t == 0 ? boot.nt : (t == 1 ? boot.at : boot.co);
            if (ci.lower - 1e-12 <= rep.truth.tau_t[t] &&
                rep.truth.tau_t[t] <= ci.upper + 1e-12)
              ci_cover[t]++;
          }
        } else {
          set = run_bound_pipeline(data, pc).intersection;
        }
        for (int t = 0; t < 3; ++t) {
          bound_low[t] += set.by_type(t).lower;
          bound_up[t] += set.by_type(t).upper;
          if (set.by_type(t).lower - 1e-12 <= rep.truth.tau_t[t] &&
              rep.truth.tau_t[t] <= set.by_type(t).upper + 1e-12)
            bound_cover[t]++;
        }
        bounds_done++;
      }
    } catch (const Error&) {
      rep.failures++;
    }
  }

  const int done = static_cast<int>(estimates.size());
  rep.reps = done;
  if (done > 0) {
    rep.itt_mean =
        std::accumulate(estimates.begin(), estimates.end(), 0.0) / done;
    rep.itt_bias = rep.itt_mean - rep.truth.tau_itt;
    double ss = 0.0;
    for (double e : estimates) ss += (e - rep.itt_mean) * (e - rep.itt_mean);
    const double emp_var = done > 1 ? ss / (done - 1) : 0.0;
    rep.itt_sd = std::sqrt(emp_var);
    rep.itt_mean_p = sum_p / done;
    rep.itt_coverage = static_cast<double>(itt_cover) / done;
    rep.var_ratio = emp_var > 0.0 ? (sum_var / done) / emp_var : 0.0;
    rep.beta_coverage.resize(p);
    for (int k = 0; k < p; ++k)
      rep.beta_coverage[k] = static_cast<double>(beta_cover[k]) / done;
  }
  if (bounds_done > 0)
    for (int t = 0; t < 3; ++t) {
      rep.bound_mean_lower[t] = bound_low[t] / bounds_done;
      rep.bound_mean_upper[t] = bound_up[t] / bounds_done;
      rep.bound_coverage[t] =
          static_cast<double>(bound_cover[t]) / bounds_done;
      rep.ci_coverage[t] = static_cast<double>(ci_cover[t]) / bounds_done;
    }
  return rep;
}

}  // namespace crtb
