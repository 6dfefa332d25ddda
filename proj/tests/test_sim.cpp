#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crtbounds/rng.hpp"
#include "crtbounds/sim.hpp"

namespace {

double expit(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

TEST_CASE("generated populations satisfy the structural invariants") {
  crtb::SimConfig cfg;
  cfg.j = 60;
  cfg.m = 30;
  cfg.seed = 21;
  crtb::Rng rng(cfg.seed, crtb::Stream::population);
  const crtb::Population pop = crtb::generate_population(cfg, rng);
  CHECK(static_cast<int>(pop.clusters.size()) == cfg.j);
  int seen[3] = {0, 0, 0};
  for (const auto& c : pop.clusters) {
    CHECK(c.units.size() >= 2);
    CHECK(c.units.size() <= 5);
    for (const auto& u : c.units) {
      CHECK((u.label >= 0 && u.label <= 2));
      ++seen[u.label];
      CHECK(u.age >= 1);
      CHECK(u.age <= 79);
      // receipt is monotone in assignment and matches the type
      CHECK(u.d[0] <= u.d[1]);
      CHECK(u.d[0] == (u.label == 1 ? 1 : 0));
      CHECK(u.d[1] == (u.label == 0 ? 0 : 1));
      // one-sided outcome improvement
      CHECK(u.y[0] <= u.y[1]);
    }
  }
  // all three types appear in a population of this size
  CHECK(seen[0] > 0);
  CHECK(seen[1] > 0);
  CHECK(seen[2] > 0);
}

TEST_CASE("outcome probabilities match the structural model") {
  // a unit that goes untreated in a fully never-taking cluster
  CHECK(expit(-3.0) == doctest::Approx(0.04742587317756678));
  // a treated, vaccinated unit
  CHECK(expit(-1.0 + 4.0) == doctest::Approx(0.9525741268224334));
  // these constants anchor the simulator's Bernoulli probabilities: with a
  // huge population the empirical rate of Y(1) among treated vaccinated
  // units concentrates near expit(3)
  crtb::SimConfig cfg;
  cfg.j = 4000;
  cfg.seed = 8;
  crtb::Rng rng(cfg.seed, crtb::Stream::population);
  const crtb::Population pop = crtb::generate_population(cfg, rng);
  double hits = 0.0, total = 0.0;
  for (const auto& c : pop.clusters)
    for (const auto& u : c.units)
      if (u.d[1] == 1 && u.vaccine == 1) {
        total += 1.0;
        hits += u.y[1];
      }
  CHECK(total > 200.0);
  CHECK(hits / total == doctest::Approx(expit(3.0)).epsilon(0.05));
}

TEST_CASE("randomization assigns exactly m clusters uniformly") {
  crtb::SimConfig cfg;
  cfg.j = 2;
  cfg.m = 1;
  cfg.seed = 3;
  crtb::Rng pop_rng(cfg.seed, crtb::Stream::population);
  const crtb::Population pop = crtb::generate_population(cfg, pop_rng);
  crtb::Rng rng(5, crtb::Stream::randomization);
  int first_treated = 0;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    std::vector<int> z;
    crtb::randomize(pop, 1, rng, &z);
    CHECK(z[0] + z[1] == 1);
    first_treated += z[0];
  }
  CHECK(first_treated > 4700);
  CHECK(first_treated < 5300);
}

TEST_CASE("true estimands respect hand-verifiable special cases") {
  crtb::SimConfig cfg;
  cfg.j = 40;
  cfg.m = 20;
  cfg.seed = 14;
  crtb::Rng rng(cfg.seed, crtb::Stream::population);
  crtb::Population pop = crtb::generate_population(cfg, rng);

  crtb::Population null_pop = pop;
  for (auto& c : null_pop.clusters)
    for (auto& u : c.units) u.y[1] = u.y[0];
  const crtb::TrueEstimands null_truth = crtb::true_estimands(null_pop);
  CHECK(null_truth.tau_itt == doctest::Approx(0.0));
  for (int t = 0; t < 3; ++t)
    CHECK(null_truth.tau_t[t] == doctest::Approx(0.0));
  for (int k = 0; k < static_cast<int>(null_truth.beta.size()); ++k)
    CHECK(null_truth.beta[k] == doctest::Approx(0.0).epsilon(1e-10));

  const crtb::TrueEstimands truth = crtb::true_estimands(pop);
  CHECK(truth.n_t[0] + truth.n_t[1] + truth.n_t[2] ==
        doctest::Approx(static_cast<double>(null_pop.n_units())));
  CHECK(truth.tau_itt ==
        doctest::Approx((truth.tau_t[0] * truth.n_t[0] +
                         truth.tau_t[1] * truth.n_t[1] +
                         truth.tau_t[2] * truth.n_t[2]) /
                        pop.n_units()));
}

TEST_CASE("population-level program inputs bracket the true effects") {
  crtb::SimConfig cfg;
  cfg.j = 80;
  cfg.seed = 31;
  crtb::Rng rng(cfg.seed, crtb::Stream::population);
  const crtb::Population pop = crtb::generate_population(cfg, rng);
  const crtb::TrueEstimands truth = crtb::true_estimands(pop);
  const int n = pop.n_units();
  // a perfect oracle prediction
  std::vector<std::vector<int>> pred(3, std::vector<int>(n, 0));
  int i = 0;
  for (const auto& c : pop.clusters)
    for (const auto& u : c.units) {
      for (int t = 0; t < 3; ++t) pred[t][i] = (u.label == t) ? 1 : 0;
      ++i;
    }
  const crtb::LpInputs inputs = crtb::population_lp_inputs(pop, pred);
  const crtb::BoundSet set = crtb::classifier_bounds(inputs);
  for (int t = 0; t < 3; ++t) {
    CHECK(set.by_type(t).feasible);
    CHECK(set.by_type(t).lower <= truth.tau_t[t] + 1e-6);
    CHECK(set.by_type(t).upper >= truth.tau_t[t] - 1e-6);
    CHECK(set.by_type(t).upper - set.by_type(t).lower <= 1e-6);
  }
}

TEST_CASE("a tiny replication run completes and reports finite summaries") {
  crtb::SimConfig cfg;
  cfg.j = 40;
  cfg.m = 20;
  cfg.reps = 3;
  cfg.seed = 77;
  crtb::ReplicationOptions opts;
  opts.bounds = true;
  const crtb::ReplicationReport rep = crtb::replicate(cfg, opts);
  CHECK(rep.reps == 3);
  CHECK(rep.failures == 0);
  CHECK(std::isfinite(rep.itt_mean));
  CHECK(std::isfinite(rep.itt_sd));
  CHECK(rep.itt_coverage >= 0.0);
  CHECK(rep.itt_coverage <= 1.0);
  for (int t = 0; t < 3; ++t)
    CHECK(rep.bound_mean_lower[t] <= rep.bound_mean_upper[t] + 1e-9);
}
