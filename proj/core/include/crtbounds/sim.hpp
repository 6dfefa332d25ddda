#pragma once

#include <vector>

#include <Eigen/Dense>

#include "crtbounds/bounds.hpp"
#include "crtbounds/model.hpp"
#include "crtbounds/rng.hpp"

namespace crtb {

struct SimConfig {
  int j = 151;  // clusters
  int m = 72;   // treated clusters
  int reps = 1000;
  std::uint64_t seed = 0;

  std::vector<int> size_values = {2, 3, 4, 5};
  std::vector<double> size_probs = {0.4, 0.3, 0.2, 0.1};
  double p_male = 0.5;
  int age_min = 1;
  int age_max = 79;
  double p_vaccine = 0.15;
};

// compliance types share the bound-module index: 0 NT, 1 AT, 2 CO
struct SimUnit {
  double male = 0.0;
  double age = 0.0;
  double vaccine = 0.0;
  int label = 0;
  int d[2] = {0, 0};  // receipts under z = 0, 1
  int y[2] = {0, 0};  // potential outcomes under z = 0, 1
};

struct SimCluster {
  std::vector<SimUnit> units;
};

// The science table: everything the analyst never sees.
struct Population {
  std::vector<SimCluster> clusters;

  int n_units() const {
    int n = 0;
    for (const auto& c : clusters) n += static_cast<int>(c.units.size());
    return n;
  }
};

struct TrueEstimands {
  double tau_itt = 0.0;
  Eigen::VectorXd beta;   // projection of unit effects on [1, covariates]
  double tau_t[3] = {};   // per compliance type; 0 for empty types
  double n_t[3] = {};     // type sizes
};

Population generate_population(const SimConfig& cfg, Rng& rng);

TrueEstimands true_estimands(const Population& pop);

// Assigns Z=1 to a uniform random m-subset of clusters and reveals the
// corresponding receipts and outcomes. Optionally reports the assignment.
StudyData randomize(const Population& pop, int m, Rng& rng,
                    std::vector<int>* z_out = nullptr);

// Exact bound-program inputs from the science table given hard type
// predictions (pred[t][i] over units in cluster-major order); used to check
// the population-level containment guarantee.
LpInputs population_lp_inputs(const Population& pop,
                              const std::vector<std::vector<int>>& pred);

struct ReplicationOptions {
  bool hetero = true;        // run the regression estimator as well
  bool bounds = false;       // run the bound pipeline per replication
  int bootstrap_b = 0;       // > 0 adds bootstrap confidence sets
  double alpha = 0.05;
  LearnerKind kind = LearnerKind::LINEAR;
};

struct ReplicationReport {
  TrueEstimands truth;
  int reps = 0;
  int failures = 0;

  double itt_mean = 0.0;
  double itt_bias = 0.0;
  double itt_sd = 0.0;
  double itt_mean_p = 0.0;
  double itt_coverage = 0.0;
  double var_ratio = 0.0;  // mean variance estimate over empirical variance
  std::vector<double> beta_coverage;

  double bound_mean_lower[3] = {};
  double bound_mean_upper[3] = {};
  double bound_coverage[3] = {};  // intersection bound contains true tau_t
  double ci_coverage[3] = {};     // bootstrap confidence set contains tau_t
};

// Fixes one population from cfg.seed, then loops randomizations.
ReplicationReport replicate(const SimConfig& cfg,
                            const ReplicationOptions& opts);

}  // namespace crtb
